"""Shared generators and reference checks for the test suite."""

from __future__ import annotations

import itertools
import random

from relhyp.calculus import Derivation, RuleId
from relhyp.hyperseq import Sequent, parse_hypersequent
from relhyp.semantics import KripkeModel
from relhyp.syntax import And, Atom, Box, Diamond, Implies, Not, Or

ATOMS = ("p", "q", "r")


def random_formula(rng: random.Random, depth: int, atoms=ATOMS, connectives=None):
    """Random formula of depth at most ``depth``."""
    connectives = connectives or (Not, And, Or, Implies, Box, Diamond)
    if depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(atoms))
    c = rng.choice(connectives)
    if c in (Not, Box, Diamond):
        return c(random_formula(rng, depth - 1, atoms, connectives))
    return c(random_formula(rng, depth - 1, atoms, connectives),
             random_formula(rng, depth - 1, atoms, connectives))


def random_sequent(rng: random.Random, depth: int = 3, width: int = 2, atoms=ATOMS) -> Sequent:
    ant = tuple(random_formula(rng, depth, atoms) for _ in range(rng.randint(0, width)))
    suc = tuple(random_formula(rng, depth, atoms) for _ in range(rng.randint(0, width)))
    return Sequent(ant, suc)


def random_hypersequent(rng: random.Random, max_len: int = 3, depth: int = 3,
                        width: int = 2, atoms=ATOMS):
    return tuple(random_sequent(rng, depth, width, atoms) for _ in range(rng.randint(1, max_len)))


def reference_eval(worlds, edges, valuation, w, f) -> bool:
    """Textbook Kripke clauses over plain sets, independent of the library."""
    if isinstance(f, Atom):
        return w in valuation.get(f.name, ())
    if isinstance(f, Not):
        return not reference_eval(worlds, edges, valuation, w, f.sub)
    if isinstance(f, And):
        return (reference_eval(worlds, edges, valuation, w, f.left)
                and reference_eval(worlds, edges, valuation, w, f.right))
    if isinstance(f, Or):
        return (reference_eval(worlds, edges, valuation, w, f.left)
                or reference_eval(worlds, edges, valuation, w, f.right))
    if isinstance(f, Implies):
        return (not reference_eval(worlds, edges, valuation, w, f.left)
                or reference_eval(worlds, edges, valuation, w, f.right))
    succ = [v for v in worlds if (w, v) in edges]
    if isinstance(f, Box):
        return all(reference_eval(worlds, edges, valuation, v, f.sub) for v in succ)
    return any(reference_eval(worlds, edges, valuation, v, f.sub) for v in succ)


def random_model(rng: random.Random, n_max: int = 4, atoms=ATOMS) -> KripkeModel:
    worlds = [str(i) for i in range(rng.randint(1, n_max))]
    edges = {(a, b) for a in worlds for b in worlds if rng.random() < 0.4}
    val = {p: {w for w in worlds if rng.random() < 0.5} for p in atoms}
    return KripkeModel.build(worlds, edges, val)


FRAME_TESTS = {
    "any": lambda ws, es: True,
    "reflexive": lambda ws, es: all((w, w) in es for w in ws),
    "serial": lambda ws, es: all(any((w, v) in es for v in ws) for w in ws),
    "symmetric": lambda ws, es: all((b, a) in es for a, b in es),
    "transitive": lambda ws, es: all((a, d) in es for a, b in es for c, d in es if b == c),
}


def enumerate_models(frame: str, max_worlds: int = 3, atoms=("p",)):
    """Every model with at most ``max_worlds`` worlds on the given frame class."""
    ok = FRAME_TESTS[frame]
    for n in range(1, max_worlds + 1):
        worlds = [str(i) for i in range(n)]
        pairs = [(a, b) for a in worlds for b in worlds]
        for bits in range(1 << len(pairs)):
            edges = {pr for k, pr in enumerate(pairs) if bits >> k & 1}
            if not ok(worlds, edges):
                continue
            for vbits in range(1 << (n * len(atoms))):
                val = {p: {w for j, w in enumerate(worlds) if vbits >> (i * n + j) & 1}
                       for i, p in enumerate(atoms)}
                yield KripkeModel.build(worlds, edges, val)


def node(rule, text, component=None, formula=None, *premises) -> Derivation:
    return Derivation(RuleId(rule), parse_hypersequent(text), component, formula, tuple(premises))


def rb_derivation() -> Derivation:
    """``=> p -> []<>p`` using Sym."""
    ax = node("Axiom", "p => p")
    ewl = node("EWL", "=> ; p => p", None, None, ax)
    dia = node("DiaR", "=> <>p ; p =>", 0, 0, ewl)
    sym = node("Sym", "p => ; => <>p", None, None, dia)
    box = node("BoxR", "p => []<>p", 0, 0, sym)
    return node("ImpR", "=> p -> []<>p", 0, 0, box)


def rs4_derivation() -> Derivation:
    """``=> []p -> [][]p`` using EW."""
    ax = node("Axiom", "p => p")
    ewl = node("EWL", "=> ; p => p", None, None, ax)
    boxl = node("BoxL", "[]p => ; => p", 0, 0, ewl)
    ew = node("EW", "[]p => ; => ; => p", 1, None, boxl)
    r2 = node("BoxR", "[]p => ; => []p", 1, 0, ew)
    r1 = node("BoxR", "[]p => [][]p", 0, 0, r2)
    return node("ImpR", "=> []p -> [][]p", 0, 0, r1)


def rs5_derivation() -> Derivation:
    """``=> <>p -> []<>p`` using EW and EE."""
    ax = node("Axiom", "p => p")
    ewl = node("EWL", "=> ; p => p", None, None, ax)
    diar = node("DiaR", "=> <>p ; p =>", 0, 0, ewl)
    ew = node("EW", "=> <>p ; => ; p =>", 1, None, diar)
    dial = node("DiaL", "=> <>p ; <>p =>", 1, 0, ew)
    ee = node("EE", "<>p => ; => <>p", 0, None, dial)
    boxr = node("BoxR", "<>p => []<>p", 0, 0, ee)
    return node("ImpR", "=> <>p -> []<>p", 0, 0, boxr)


def reduced_violations(h, logic: str) -> list[str]:
    """Reduced-subformula properties that fail in a fully reduced labelled hypersequent."""
    bad = []
    comps = h.components
    for sigma in h.distinct_labels():
        i = h.rightmost_index(sigma)
        s = comps[i][1]
        g, d = set(s.antecedent), set(s.succedent)
        for f in g:
            if isinstance(f, Not) and f.sub not in d:
                bad.append(f"NegL {sigma}")
            if isinstance(f, And) and not {f.left, f.right} <= g:
                bad.append(f"AndL {sigma}")
            if isinstance(f, Or) and f.left not in g and f.right not in g:
                bad.append(f"OrL {sigma}")
            if isinstance(f, Implies) and f.left not in d and f.right not in g:
                bad.append(f"ImpL {sigma}")
            if logic == "T" and isinstance(f, Box) and f.sub not in g:
                bad.append(f"T-box {sigma}")
        for f in d:
            if isinstance(f, Not) and f.sub not in g:
                bad.append(f"NegR {sigma}")
            if isinstance(f, And) and f.left not in d and f.right not in d:
                bad.append(f"AndR {sigma}")
            if isinstance(f, Or) and not {f.left, f.right} <= d:
                bad.append(f"OrR {sigma}")
            if isinstance(f, Implies) and not (f.left in g and f.right in d):
                bad.append(f"ImpR {sigma}")
            if logic == "T" and isinstance(f, Diamond) and f.sub not in d:
                bad.append(f"T-dia {sigma}")
        if i > 0:
            left = comps[i - 1][1]
            for f in left.antecedent:
                if isinstance(f, Box) and f.sub not in g:
                    bad.append(f"BoxL {sigma}")
            for f in left.succedent:
                if isinstance(f, Diamond) and f.sub not in d:
                    bad.append(f"DiaR {sigma}")
    return bad


def all_formulas(max_degree: int, atoms=("p", "q"), unary=(Not, Box), binary=(And,)):
    """Every formula up to ``max_degree`` connectives, grouped by degree."""
    by_deg = [[Atom(a) for a in atoms]]
    for k in range(1, max_degree + 1):
        layer = [c(f) for c in unary for f in by_deg[k - 1]]
        for i in range(k):
            j = k - 1 - i
            layer += [c(a, b) for c in binary for a, b in itertools.product(by_deg[i], by_deg[j])]
        by_deg.append(layer)
    return [f for layer in by_deg for f in layer]
