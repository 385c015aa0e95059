"""Kripke semantics for relational hypersequents.

A counterexample to ``G1 ; ... ; Gn`` is a model together with a branch of
worlds ``w1 R w2 R ... R wn`` such that each ``Gi`` is falsified at ``wi``
(antecedent true, succedent false).  Besides evaluation this module holds
frame checks, JSON/DOT serialisation of models and a bounded, exhaustive
search for tree-shaped counterexamples used to cross-check the prover.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Any, Iterable, Mapping

from .calculus import LogicId
from .hyperseq import Hypersequent, Sequent
from .syntax import (
    And, Atom, Box, Diamond, Formula, Implies, Not, Or, atoms, degree,
    modal_depth, subformulas,
)

__all__ = [
    "KripkeModel", "InvalidModel", "UnknownWorld", "LengthMismatch",
    "BoundTooLarge", "FrameProperty", "ModelBound", "world_key", "evaluate",
    "extension", "is_countermodel", "is_counterexample", "has_counterexample",
    "frame_check", "frame_property_for", "oracle_search", "default_bound",
    "model_to_json", "model_from_json", "dumps_model", "loads_model", "to_dot",
]


class InvalidModel(ValueError):
    pass


class UnknownWorld(KeyError):
    pass


class LengthMismatch(ValueError):
    pass


class BoundTooLarge(RuntimeError):
    pass


def world_key(w: str):
    """Sort dotted-number world ids numerically, anything else after them."""
    parts = w.split(".")
    if all(p.isdigit() for p in parts):
        return (0, tuple(int(p) for p in parts), "")
    return (1, (), w)


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        ws = set(self.worlds)
        if len(ws) != len(self.worlds):
            raise InvalidModel("duplicate world")
        for a, b in self.edges:
            if a not in ws or b not in ws:
                raise InvalidModel(f"edge ({a}, {b}) mentions an unknown world")
        for p, vs in self.valuation.items():
            missing = set(vs) - ws
            if missing:
                raise InvalidModel(f"valuation of {p} mentions unknown world(s) {sorted(missing)}")

    @classmethod
    def build(cls, worlds: Iterable[str], edges: Iterable[tuple[str, str]],
              valuation: Mapping[str, Iterable[str]]) -> "KripkeModel":
        return cls(tuple(sorted(set(worlds), key=world_key)),
                   frozenset((a, b) for a, b in edges),
                   {p: frozenset(vs) for p, vs in sorted(valuation.items())})

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        succ: dict[str, list[str]] = {w: [] for w in self.worlds}
        for a, b in self.edges:
            succ[a].append(b)
        return {w: tuple(sorted(vs, key=world_key)) for w, vs in succ.items()}

    def true_atoms(self, w: str) -> list[str]:
        return sorted(p for p, vs in self.valuation.items() if w in vs)

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (set(self.worlds) == set(other.worlds) and self.edges == other.edges
                and {p: v for p, v in self.valuation.items() if v}
                == {p: v for p, v in other.valuation.items() if v})

    __hash__ = None


def evaluate(m: KripkeModel, w: str, f: Formula) -> bool:
    """``m, w |= f`` under the standard Kripke clauses."""
    if w not in m.successors:
        raise UnknownWorld(w)
    cls = type(f)
    if cls is Atom:
        return w in m.valuation.get(f.name, ())
    if cls is Not:
        return not evaluate(m, w, f.sub)
    if cls is And:
        return evaluate(m, w, f.left) and evaluate(m, w, f.right)
    if cls is Or:
        return evaluate(m, w, f.left) or evaluate(m, w, f.right)
    if cls is Implies:
        return not evaluate(m, w, f.left) or evaluate(m, w, f.right)
    if cls is Box:
        return all(evaluate(m, v, f.sub) for v in m.successors[w])
    return any(evaluate(m, v, f.sub) for v in m.successors[w])


def extension(m: KripkeModel, f: Formula, memo: dict | None = None) -> frozenset[str]:
    """Set of worlds where ``f`` holds, computed bottom-up."""
    memo = {} if memo is None else memo
    if f in memo:
        return memo[f]
    cls = type(f)
    everything = frozenset(m.worlds)
    if cls is Atom:
        out = frozenset(m.valuation.get(f.name, ()))
    elif cls is Not:
        out = everything - extension(m, f.sub, memo)
    elif cls is And:
        out = extension(m, f.left, memo) & extension(m, f.right, memo)
    elif cls is Or:
        out = extension(m, f.left, memo) | extension(m, f.right, memo)
    elif cls is Implies:
        out = (everything - extension(m, f.left, memo)) | extension(m, f.right, memo)
    else:
        sub = extension(m, f.sub, memo)
        succ = m.successors
        if cls is Box:
            out = frozenset(w for w in m.worlds if all(v in sub for v in succ[w]))
        else:
            out = frozenset(w for w in m.worlds if any(v in sub for v in succ[w]))
    memo[f] = out
    return out


def is_countermodel(m: KripkeModel, w: str, s: Sequent) -> bool:
    return (all(evaluate(m, w, f) for f in s.antecedent)
            and not any(evaluate(m, w, f) for f in s.succedent))


def is_counterexample(m: KripkeModel, assignment: tuple[str, ...] | list[str], h: Hypersequent) -> bool:
    if len(assignment) != len(h):
        raise LengthMismatch(f"{len(assignment)} worlds for {len(h)} components")
    for w in assignment:
        if w not in m.successors:
            raise UnknownWorld(w)
    if any((a, b) not in m.edges for a, b in zip(assignment, assignment[1:])):
        return False
    return all(is_countermodel(m, w, s) for w, s in zip(assignment, h))


def _falsifying_worlds(m: KripkeModel, s: Sequent, memo: dict) -> frozenset[str]:
    out = frozenset(m.worlds)
    for f in s.antecedent:
        out &= extension(m, f, memo)
    for f in s.succedent:
        out -= extension(m, f, memo)
    return out


def has_counterexample(m: KripkeModel, h: Hypersequent) -> tuple[str, ...] | None:
    """First branch (in world order) falsifying every component of ``h``."""
    memo: dict = {}
    good = [_falsifying_worlds(m, s, memo) for s in h]
    n = len(h)

    def extend(path):
        if len(path) == n:
            return tuple(path)
        nxt = good[len(path)]
        for v in m.successors[path[-1]]:
            if v in nxt:
                found = extend(path + [v])
                if found:
                    return found
        return None

    for w in m.worlds:
        if w in good[0]:
            found = extend([w])
            if found:
                return found
    return None


class FrameProperty(str, Enum):
    reflexive = "reflexive"
    symmetric = "symmetric"
    transitive = "transitive"
    serial = "serial"
    equivalence = "equivalence"


def frame_check(m: KripkeModel, prop: FrameProperty | str) -> bool:
    prop = FrameProperty(prop)
    e = m.edges
    if prop is FrameProperty.reflexive:
        return all((w, w) in e for w in m.worlds)
    if prop is FrameProperty.symmetric:
        return all((b, a) in e for a, b in e)
    if prop is FrameProperty.transitive:
        succ = m.successors
        return all((a, c) in e for a, b in e for c in succ[b])
    if prop is FrameProperty.serial:
        return all(m.successors[w] for w in m.worlds)
    return all(frame_check(m, p) for p in
               (FrameProperty.reflexive, FrameProperty.symmetric, FrameProperty.transitive))


_FRAMES = {
    LogicId.K: (),
    LogicId.T: (FrameProperty.reflexive,),
    LogicId.D: (FrameProperty.serial,),
    LogicId.B: (FrameProperty.symmetric,),
    LogicId.S4: (FrameProperty.reflexive, FrameProperty.transitive),
    LogicId.S5: (FrameProperty.equivalence,),
}


def frame_property_for(logic: LogicId | str) -> tuple[FrameProperty, ...]:
    """Frame conditions a countermodel must meet for ``logic``."""
    return _FRAMES[LogicId(logic)]


# ---------------------------------------------------------------------------
# Bounded oracle

@dataclass(frozen=True)
class ModelBound:
    """Limits of the oracle's model class.

    Trees of height at most ``max_depth`` whose nodes have at most
    ``max_branch`` children and at most ``max_worlds`` nodes in total.
    ``budget`` caps the number of enumeration steps.
    """

    max_depth: int
    max_branch: int
    max_worlds: int | None = None
    budget: int = 2_000_000


def default_bound(h: Hypersequent) -> ModelBound:
    fs = [f for s in h for f in s.antecedent + s.succedent]
    depth = max((modal_depth(f) for f in fs), default=0) + len(h)
    modal = {g for f in fs for g in subformulas(f) if type(g) in (Box, Diamond)}
    return ModelBound(depth, max(1, len(modal)))


def oracle_search(h: Hypersequent, logic: LogicId | str,
                  bound: ModelBound | None = None) -> tuple[KripkeModel, tuple[str, ...]] | None:
    """Exhaustively look for a tree-shaped counterexample within ``bound``.

    Trees are explored up to equivalence of the subtrees' observable
    behaviour: a subtree matters only through which subformulas of ``h`` are
    true at its root and which suffixes of ``h`` can be falsified along a
    branch starting there.  For T every world sees itself; for D the leaves
    do.  A returned model always satisfies ``is_counterexample``; ``None``
    means none exists inside the bound.
    """
    logic = LogicId(logic)
    if logic not in (LogicId.K, LogicId.T, LogicId.D):
        raise ValueError(f"oracle supports K, T and D, not {logic.value}")
    h = tuple(h)
    bound = bound or default_bound(h)
    fs = [f for s in h for f in s.antecedent + s.succedent]
    subs = sorted({g for f in fs for g in subformulas(f)}, key=lambda g: (degree(g), repr(g)))
    bit = {g: 1 << k for k, g in enumerate(subs)}
    full = (1 << len(subs)) - 1
    names = sorted({a for f in fs for a in atoms(f)})
    n = len(h)
    # masks over distinct formulas: repeated occurrences must not carry into the next bit
    need = [(sum(bit[f] for f in set(s.antecedent)), sum(bit[f] for f in set(s.succedent))) for s in h]
    steps = 0

    def tick(k=1):
        nonlocal steps
        steps += k
        if steps > bound.budget:
            raise BoundTooLarge(f"enumeration exceeded {bound.budget} steps")

    def node_state(val: frozenset[str], all_mask: int, any_mask: int, reach: int, refl: bool):
        t = 0
        for g in subs:
            cls = type(g)
            if cls is Atom:
                v = g.name in val
            elif cls is Not:
                v = not t & bit[g.sub]
            elif cls is And:
                v = bool(t & bit[g.left]) and bool(t & bit[g.right])
            elif cls is Or:
                v = bool(t & bit[g.left]) or bool(t & bit[g.right])
            elif cls is Implies:
                v = not t & bit[g.left] or bool(t & bit[g.right])
            elif cls is Box:
                v = bool(all_mask & bit[g.sub]) and (not refl or bool(t & bit[g.sub]))
            else:
                v = bool(any_mask & bit[g.sub]) or (refl and bool(t & bit[g.sub]))
            if v:
                t |= bit[g]
        r = 0
        for i in range(n - 1, -1, -1):
            yes, no = need[i]
            if t & yes == yes and not t & no:
                if i == n - 1 or reach & (1 << (i + 1)) or (refl and r & (1 << (i + 1))):
                    r |= 1 << i
        return t, r

    valuations = [frozenset(p for p, on in zip(names, bits) if on)
                  for bits in product((False, True), repeat=len(names))]
    leaf_refl = logic in (LogicId.T, LogicId.D)
    cap = bound.max_worlds if bound.max_worlds is not None else float("inf")

    # state -> (size, valuation, child states)
    best: dict[tuple[int, int], tuple[int, frozenset[str], tuple]] = {}
    for val in valuations:
        tick()
        st = node_state(val, full, 0, 0, leaf_refl)
        if st not in best and cap >= 1:
            best[st] = (1, val, ())

    def done():
        hits = [(size, st) for st, (size, _, _) in best.items() if st[1] & 1]
        return min(hits, key=lambda x: (x[0], x[1]))[1] if hits else None

    root = done()
    level = 0
    inner_refl = logic is LogicId.T
    while root is None and level < bound.max_depth and bound.max_branch > 0:
        level += 1
        prev = dict(best)
        states = sorted(prev)
        # aggregates of child sets: (all, any, reach) -> (size, children)
        aggs: dict[tuple[int, int, int], tuple[int, tuple]] = {}
        frontier = {}
        for st in states:
            tick()
            t, r = st
            key = (t, t, r)
            size = prev[st][0]
            if key not in frontier or frontier[key][0] > size:
                frontier[key] = (size, (st,))
        aggs.update(frontier)
        for _ in range(bound.max_branch - 1):
            nxt = {}
            for (a, y, r), (size, kids) in frontier.items():
                for st in states:
                    if st in kids:
                        continue
                    tick()
                    t, rr = st
                    key = (a & t, y | t, r | rr)
                    total = size + prev[st][0]
                    if total + 1 > cap:
                        continue
                    if key not in aggs or aggs[key][0] > total:
                        entry = (total, tuple(sorted(kids + (st,))))
                        aggs[key] = entry
                        nxt[key] = entry
            if not nxt:
                break
            frontier = nxt
        for (a, y, r), (size, kids) in aggs.items():
            if size + 1 > cap:
                continue
            for val in valuations:
                tick()
                st = node_state(val, a, y, r, inner_refl)
                if st not in best or best[st][0] > size + 1:
                    best[st] = (size + 1, val, kids)
        root = done()

    if root is None:
        return None
    worlds, edges, valuation = [], [], {p: set() for p in names}

    def build(st, label):
        worlds.append(label)
        _, val, kids = best[st]
        for p in val:
            valuation[p].add(label)
        if inner_refl or (leaf_refl and not kids):
            edges.append((label, label))
        for k, child in enumerate(kids, start=1):
            lab = f"{label}.{k}"
            edges.append((label, lab))
            build(child, lab)

    build(root, "0")
    model = KripkeModel.build(worlds, edges, valuation)
    assignment = has_counterexample(model, h)
    assert assignment is not None, "oracle state bookkeeping out of sync"
    return model, assignment


# ---------------------------------------------------------------------------
# Serialisation

def model_to_json(m: KripkeModel) -> dict[str, Any]:
    return {
        "worlds": list(m.worlds),
        "edges": [list(e) for e in sorted(m.edges, key=lambda e: (world_key(e[0]), world_key(e[1])))],
        "valuation": {p: sorted(vs, key=world_key) for p, vs in sorted(m.valuation.items())},
    }


def model_from_json(obj: Any) -> KripkeModel:
    """Build a model from its JSON form; raises ``InvalidModel`` when malformed."""
    if not isinstance(obj, dict):
        raise InvalidModel("model must be a JSON object")
    try:
        worlds = obj["worlds"]
        edges = obj.get("edges", [])
        valuation = obj.get("valuation", {})
    except KeyError:
        raise InvalidModel("model lacks 'worlds'") from None
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise InvalidModel("'worlds' must be an array of strings")
    if not isinstance(edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges):
        raise InvalidModel("'edges' must be an array of [from, to] pairs")
    if not isinstance(valuation, dict) or not all(
            isinstance(v, list) and all(isinstance(x, str) for x in v) for v in valuation.values()):
        raise InvalidModel("'valuation' must map atoms to arrays of worlds")
    return KripkeModel(tuple(worlds), frozenset((a, b) for a, b in edges),
                       {p: frozenset(v) for p, v in valuation.items()})


def dumps_model(m: KripkeModel, indent: int | None = 2) -> str:
    return json.dumps(model_to_json(m), indent=indent)


def loads_model(text: str) -> KripkeModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidModel(f"not JSON: {e}") from None
    return model_from_json(obj)


def to_dot(m: KripkeModel, name: str = "model") -> str:
    """GraphViz text: one node per world labelled with its true atoms."""
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    for w in m.worlds:
        true = ", ".join(m.true_atoms(w))
        label = f"{w}\\n{true}" if true else w
        lines.append(f'  "{w}" [label="{label}"];')
    for a, b in sorted(m.edges, key=lambda e: (world_key(e[0]), world_key(e[1]))):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
