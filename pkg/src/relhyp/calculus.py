"""Rule schemas of the relational hypersequent calculi and a derivation checker.

A derivation is a tree of rule applications whose conclusions are plain
(unlabelled) hypersequents.  Every node names its rule and the position it
acts on, so checking a step is a direct comparison against the schema and
never a search (Cut excepted: its cut formula is recovered from the
premises).

Positions are 0-based.  ``component`` indexes the conclusion's components;
``formula`` indexes the principal formula on the side the rule acts on
(antecedent for the ``L`` rules, succedent for the ``R`` rules), again in the
conclusion.  Structural rules that act on whole components only use
``component``; Sym, EWL, EWR and Drop need neither.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

from .hyperseq import (
    Hypersequent, Sequent, closing_formula, parse_hypersequent,
    render_hypersequent, same_multiset,
)
from .syntax import And, Box, Diamond, Formula, Implies, Not, Or

__all__ = [
    "RuleId", "LogicId", "Derivation", "StepError", "NotClosed", "CheckReport",
    "BASE_RULES", "rules_of", "check_step", "check_derivation",
    "closure_derivation", "derivation_to_json", "derivation_from_json",
    "dumps_derivation", "loads_derivation", "derivation_size",
]


class RuleId(str, Enum):
    Axiom = "Axiom"
    WL = "WL"
    WR = "WR"
    CL = "CL"
    CR = "CR"
    Cut = "Cut"
    EWL = "EWL"
    EWR = "EWR"
    NegL = "NegL"
    NegR = "NegR"
    AndL1 = "AndL1"
    AndL2 = "AndL2"
    AndR = "AndR"
    OrL = "OrL"
    OrR1 = "OrR1"
    OrR2 = "OrR2"
    ImpL = "ImpL"
    ImpR = "ImpR"
    BoxL = "BoxL"
    BoxR = "BoxR"
    DiaL = "DiaL"
    DiaR = "DiaR"
    EC = "EC"
    EW = "EW"
    EE = "EE"
    Sym = "Sym"
    Drop = "Drop"


class LogicId(str, Enum):
    K = "K"
    T = "T"
    S4 = "S4"
    S5 = "S5"
    D = "D"
    B = "B"

    @classmethod
    def parse(cls, text: str) -> "LogicId":
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"unknown logic {text!r}") from None


BASE_RULES = frozenset(RuleId) - {
    RuleId.Cut, RuleId.EC, RuleId.EW, RuleId.EE, RuleId.Sym, RuleId.Drop}

_EXTRAS = {
    LogicId.K: (),
    LogicId.T: (RuleId.EC,),
    LogicId.S4: (RuleId.EC, RuleId.EW),
    LogicId.S5: (RuleId.EC, RuleId.EW, RuleId.EE),
    LogicId.D: (RuleId.Drop,),
    LogicId.B: (RuleId.Sym,),
}


def rules_of(logic: LogicId | str, allow_cut: bool = False) -> frozenset[RuleId]:
    rules = BASE_RULES | set(_EXTRAS[LogicId(logic)])
    if allow_cut:
        rules |= {RuleId.Cut}
    return frozenset(rules)


@dataclass(frozen=True)
class Derivation:
    rule: RuleId
    conclusion: Hypersequent
    component: int | None = None
    formula: int | None = None
    premises: tuple["Derivation", ...] = ()

    def nodes(self):
        """Pre-order traversal, iterative so deep derivations are fine."""
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def rules_used(self) -> set[RuleId]:
        return {d.rule for d in self.nodes()}


def derivation_size(d: Derivation) -> int:
    return sum(1 for _ in d.nodes())


class StepError(Exception):
    """A node does not instantiate its rule schema."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class NotClosed(ValueError):
    pass


@dataclass
class CheckReport:
    valid: bool
    path: tuple[int, ...] | None = None
    error: str | None = None
    rule: RuleId | None = None
    nodes_checked: int = 0

    def __str__(self) -> str:
        if self.valid:
            return f"valid ({self.nodes_checked} nodes)"
        path = "/".join(map(str, self.path)) or "root"
        return f"invalid at {path} ({self.rule.value}): {self.error}"


# ---------------------------------------------------------------------------
# Multiset helpers

def _remove_at(fs: tuple[Formula, ...], i: int) -> tuple[Formula, ...]:
    return fs[:i] + fs[i + 1:]


def _remove_one(fs: Sequence[Formula], f: Formula) -> tuple[Formula, ...]:
    fs = tuple(fs)
    i = fs.index(f)
    return fs[:i] + fs[i + 1:]


def _same(a: Sequent, b: Sequent) -> bool:
    return a.same_as(b)


def _require(cond: bool, reason: str):
    if not cond:
        raise StepError(reason)


def _same_context(conc: Hypersequent, prem: Hypersequent, skip: set[int]):
    _require(len(conc) == len(prem), f"premise has {len(prem)} components, expected {len(conc)}")
    for k, (a, b) in enumerate(zip(conc, prem)):
        if k not in skip:
            _require(_same(a, b), f"component {k} differs between premise and conclusion")


def _component(conc: Hypersequent, component: int | None) -> Sequent:
    _require(component is not None, "missing component position")
    _require(0 <= component < len(conc), f"component {component} out of range")
    return conc[component]


def _principal(side: tuple[Formula, ...], formula: int | None, shape) -> Formula:
    _require(formula is not None, "missing formula position")
    _require(0 <= formula < len(side), f"formula {formula} out of range")
    f = side[formula]
    if shape is not None:
        _require(isinstance(f, shape), f"principal formula is not a {shape.__name__}")
    return f


def _expect_seq(prem: Sequent, ant, succ, what: str = "active component"):
    _require(same_multiset(prem.antecedent, ant) and same_multiset(prem.succedent, succ),
             f"{what} of premise does not match the schema")


def _arity(premises, n: int):
    _require(len(premises) == n, f"expected {n} premise(s), got {len(premises)}")


# ---------------------------------------------------------------------------
# Schemas

def _axiom(conc, component, formula, premises):
    _arity(premises, 0)
    _require(len(conc) == 1, "axiom has a single component")
    s = conc[0]
    _require(len(s.antecedent) == 1 and s.antecedent == s.succedent, "axiom must be φ => φ")


def _weakening(side):
    def check(conc, component, formula, premises):
        _arity(premises, 1)
        (prem,) = premises
        s = _component(conc, component)
        _same_context(conc, prem, {component})
        if side == "L":
            _principal(s.antecedent, formula, None)
            _expect_seq(prem[component], _remove_at(s.antecedent, formula), s.succedent)
        else:
            _principal(s.succedent, formula, None)
            _expect_seq(prem[component], s.antecedent, _remove_at(s.succedent, formula))
    return check


def _contraction(side):
    def check(conc, component, formula, premises):
        _arity(premises, 1)
        (prem,) = premises
        s = _component(conc, component)
        _same_context(conc, prem, {component})
        if side == "L":
            f = _principal(s.antecedent, formula, None)
            _expect_seq(prem[component], s.antecedent + (f,), s.succedent)
        else:
            f = _principal(s.succedent, formula, None)
            _expect_seq(prem[component], s.antecedent, s.succedent + (f,))
    return check


def _cut(conc, component, formula, premises):
    _arity(premises, 2)
    p1, p2 = premises
    s = _component(conc, component)
    _same_context(conc, p1, {component})
    _same_context(conc, p2, {component})
    a, b = p1[component], p2[component]
    # p1 = Γ => Δ, φ ; p2 = φ, Λ => Θ ; conclusion = Γ, Λ => Δ, Θ
    for phi in dict.fromkeys(f for f in b.antecedent if f in a.succedent):
        lam = _remove_one(b.antecedent, phi)
        delta = _remove_one(a.succedent, phi)
        if (same_multiset(s.antecedent, a.antecedent + lam)
                and same_multiset(s.succedent, delta + b.succedent)):
            return
    raise StepError("no cut formula fits the premises")


def _ext_weakening(side):
    def check(conc, component, formula, premises):
        _arity(premises, 1)
        (prem,) = premises
        _require(len(conc) >= 2, "external weakening needs at least two components")
        if side == "L":
            _require(conc[0].is_empty, "leftmost component must be empty")
            _same_context(conc[1:], prem, set())
        else:
            _require(conc[-1].is_empty, "rightmost component must be empty")
            _same_context(conc[:-1], prem, set())
    return check


def _one_premise_logical(side, shape, premise_of):
    """Rules that rewrite one formula of one component in place."""
    def check(conc, component, formula, premises):
        _arity(premises, 1)
        (prem,) = premises
        s = _component(conc, component)
        _same_context(conc, prem, {component})
        if side == "L":
            f = _principal(s.antecedent, formula, shape)
            rest = Sequent(_remove_at(s.antecedent, formula), s.succedent)
        else:
            f = _principal(s.succedent, formula, shape)
            rest = Sequent(s.antecedent, _remove_at(s.succedent, formula))
        ant, succ = premise_of(f, rest)
        _expect_seq(prem[component], ant, succ)
    return check


def _two_premise_logical(side, shape, premises_of):
    def check(conc, component, formula, premises):
        _arity(premises, 2)
        s = _component(conc, component)
        if side == "L":
            f = _principal(s.antecedent, formula, shape)
            rest = Sequent(_remove_at(s.antecedent, formula), s.succedent)
        else:
            f = _principal(s.succedent, formula, shape)
            rest = Sequent(s.antecedent, _remove_at(s.succedent, formula))
        for k, (prem, (ant, succ)) in enumerate(zip(premises, premises_of(f, rest))):
            _same_context(conc, prem, {component})
            _expect_seq(prem[component], ant, succ, f"active component of premise {k + 1}")
    return check


def _box_l(conc, component, formula, premises):
    # G < []φ,Γ => Δ < Λ => Θ < H   from   G < Γ => Δ < φ,Λ => Θ < H
    _arity(premises, 1)
    (prem,) = premises
    s = _component(conc, component)
    _require(component + 1 < len(conc), "□L needs a right neighbour component")
    f = _principal(s.antecedent, formula, Box)
    _same_context(conc, prem, {component, component + 1})
    nxt = conc[component + 1]
    _expect_seq(prem[component], _remove_at(s.antecedent, formula), s.succedent)
    _expect_seq(prem[component + 1], nxt.antecedent + (f.sub,), nxt.succedent, "right neighbour")


def _dia_r(conc, component, formula, premises):
    # G < Γ => Δ,<>φ < Λ => Θ < H   from   G < Γ => Δ < Λ => Θ,φ < H
    _arity(premises, 1)
    (prem,) = premises
    s = _component(conc, component)
    _require(component + 1 < len(conc), "◇R needs a right neighbour component")
    f = _principal(s.succedent, formula, Diamond)
    _same_context(conc, prem, {component, component + 1})
    nxt = conc[component + 1]
    _expect_seq(prem[component], s.antecedent, _remove_at(s.succedent, formula))
    _expect_seq(prem[component + 1], nxt.antecedent, nxt.succedent + (f.sub,), "right neighbour")


def _new_world(side):
    # □R: H < Γ => Δ,[]φ  from  H < Γ => Δ < => φ ;  ◇L mirrors it.
    def check(conc, component, formula, premises):
        _arity(premises, 1)
        (prem,) = premises
        s = _component(conc, component)
        _require(component == len(conc) - 1, "the active component must be rightmost")
        _require(len(prem) == len(conc) + 1, "premise must add one component on the right")
        _same_context(conc[:-1], prem[:-2], set())
        if side == "R":
            f = _principal(s.succedent, formula, Box)
            _expect_seq(prem[-2], s.antecedent, _remove_at(s.succedent, formula))
            _expect_seq(prem[-1], (), (f.sub,), "new component")
        else:
            f = _principal(s.antecedent, formula, Diamond)
            _expect_seq(prem[-2], _remove_at(s.antecedent, formula), s.succedent)
            _expect_seq(prem[-1], (f.sub,), (), "new component")
    return check


def _ec(conc, component, formula, premises):
    _arity(premises, 1)
    (prem,) = premises
    s = _component(conc, component)
    _require(len(prem) == len(conc) + 1, "premise must have one more component")
    expected = conc[:component] + (s, s) + conc[component + 1:]
    _same_context(expected, prem, set())


def _ew(conc, component, formula, premises):
    _arity(premises, 1)
    (prem,) = premises
    s = _component(conc, component)
    _require(s.is_empty, "the weakened component must be empty")
    _require(len(conc) >= 2, "EW needs at least two components")
    _same_context(conc[:component] + conc[component + 1:], prem, set())


def _ee(conc, component, formula, premises):
    _arity(premises, 1)
    (prem,) = premises
    _component(conc, component)
    _require(component + 1 < len(conc), "EE exchanges a component with its right neighbour")
    swapped = conc[:component] + (conc[component + 1], conc[component]) + conc[component + 2:]
    _same_context(swapped, prem, set())


def _sym(conc, component, formula, premises):
    _arity(premises, 1)
    _same_context(tuple(reversed(conc)), premises[0], set())


def _drop(conc, component, formula, premises):
    _arity(premises, 1)
    (prem,) = premises
    _require(len(prem) == len(conc) + 1 and prem[-1].is_empty,
             "premise must end with an extra empty component")
    _same_context(conc, prem[:-1], set())


_SCHEMAS = {
    RuleId.Axiom: _axiom,
    RuleId.WL: _weakening("L"),
    RuleId.WR: _weakening("R"),
    RuleId.CL: _contraction("L"),
    RuleId.CR: _contraction("R"),
    RuleId.Cut: _cut,
    RuleId.EWL: _ext_weakening("L"),
    RuleId.EWR: _ext_weakening("R"),
    RuleId.NegL: _one_premise_logical(
        "L", Not, lambda f, s: (s.antecedent, s.succedent + (f.sub,))),
    RuleId.NegR: _one_premise_logical(
        "R", Not, lambda f, s: (s.antecedent + (f.sub,), s.succedent)),
    RuleId.AndL1: _one_premise_logical(
        "L", And, lambda f, s: (s.antecedent + (f.left,), s.succedent)),
    RuleId.AndL2: _one_premise_logical(
        "L", And, lambda f, s: (s.antecedent + (f.right,), s.succedent)),
    RuleId.AndR: _two_premise_logical(
        "R", And, lambda f, s: [(s.antecedent, s.succedent + (f.left,)),
                                (s.antecedent, s.succedent + (f.right,))]),
    RuleId.OrL: _two_premise_logical(
        "L", Or, lambda f, s: [(s.antecedent + (f.left,), s.succedent),
                               (s.antecedent + (f.right,), s.succedent)]),
    RuleId.OrR1: _one_premise_logical(
        "R", Or, lambda f, s: (s.antecedent, s.succedent + (f.left,))),
    RuleId.OrR2: _one_premise_logical(
        "R", Or, lambda f, s: (s.antecedent, s.succedent + (f.right,))),
    RuleId.ImpL: _two_premise_logical(
        "L", Implies, lambda f, s: [(s.antecedent, s.succedent + (f.left,)),
                                    (s.antecedent + (f.right,), s.succedent)]),
    RuleId.ImpR: _one_premise_logical(
        "R", Implies, lambda f, s: (s.antecedent + (f.left,), s.succedent + (f.right,))),
    RuleId.BoxL: _box_l,
    RuleId.BoxR: _new_world("R"),
    RuleId.DiaL: _new_world("L"),
    RuleId.DiaR: _dia_r,
    RuleId.EC: _ec,
    RuleId.EW: _ew,
    RuleId.EE: _ee,
    RuleId.Sym: _sym,
    RuleId.Drop: _drop,
}


def check_step(conclusion: Hypersequent, rule: RuleId | str, position: tuple[int | None, int | None],
               premises: Sequence[Hypersequent]) -> bool:
    """Check one inference against its schema; raise ``StepError`` on mismatch."""
    component, formula = position
    _require(len(conclusion) > 0, "empty conclusion")
    for p in premises:
        _require(len(p) > 0, "empty premise")
    _SCHEMAS[RuleId(rule)](tuple(conclusion), component, formula, [tuple(p) for p in premises])
    return True


def check_derivation(d: Derivation, logic: LogicId | str, allow_cut: bool = False) -> CheckReport:
    allowed = rules_of(logic, allow_cut)
    count = 0
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        count += 1
        if node.rule not in allowed:
            return CheckReport(False, path, f"rule {node.rule.value} not in logic {LogicId(logic).value}",
                               node.rule, count)
        try:
            check_step(node.conclusion, node.rule, (node.component, node.formula),
                       [p.conclusion for p in node.premises])
        except StepError as e:
            return CheckReport(False, path, e.reason, node.rule, count)
        for k in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[k], path + (k,)))
    return CheckReport(True, nodes_checked=count)


# ---------------------------------------------------------------------------
# Building derivations

def _weaken_into(d: Derivation, target: Sequent, index: int, have: Sequent) -> tuple[Derivation, Sequent]:
    """Weaken component ``index`` from ``have`` up to ``target`` (multiset).

    Formulas are inserted so that the final component lists them in
    ``target``'s order.
    """
    def plan(want, got):
        budget = Counter(got)
        present = []
        for f in want:
            present.append(budget[f] > 0)
            if budget[f]:
                budget[f] -= 1
        return present

    for side in ("L", "R"):
        want = target.antecedent if side == "L" else target.succedent
        got = have.antecedent if side == "L" else have.succedent
        present = plan(want, got)
        for k, f in enumerate(want):
            if present[k]:
                continue
            present[k] = True
            current = tuple(g for g, p in zip(want, present) if p)
            pos = sum(present[:k])
            have = Sequent(current, have.succedent) if side == "L" else Sequent(have.antecedent, current)
            conc = d.conclusion[:index] + (have,) + d.conclusion[index + 1:]
            d = Derivation(RuleId.WL if side == "L" else RuleId.WR, conc, index, pos, (d,))
    return d, have


def extend_right(d: Derivation, full: Hypersequent) -> Derivation:
    """Append the components of ``full`` missing on the right of ``d`` via EWR."""
    n = len(d.conclusion)
    assert all(a.same_as(b) for a, b in zip(d.conclusion, full[:n]))
    for i in range(n, len(full)):
        d = Derivation(RuleId.EWR, d.conclusion + (Sequent(),), premises=(d,))
        d, _ = _weaken_into(d, full[i], i, Sequent())
    return d


def closure_derivation(h: Hypersequent, component_index: int, shared: Formula) -> Derivation:
    """Derive ``h`` from the axiom ``shared => shared`` with weakenings only."""
    h = tuple(h)
    if not 0 <= component_index < len(h):
        raise NotClosed(f"component {component_index} out of range")
    s = h[component_index]
    if shared not in s.antecedent or shared not in s.succedent:
        raise NotClosed(f"{shared} does not occur on both sides of component {component_index}")
    ax = Sequent((shared,), (shared,))
    d = Derivation(RuleId.Axiom, (ax,))
    d, _ = _weaken_into(d, s, 0, ax)
    for i in range(component_index + 1, len(h)):
        d = Derivation(RuleId.EWR, d.conclusion + (Sequent(),), premises=(d,))
        d, _ = _weaken_into(d, h[i], len(d.conclusion) - 1, Sequent())
    for i in range(component_index - 1, -1, -1):
        d = Derivation(RuleId.EWL, (Sequent(),) + d.conclusion, premises=(d,))
        d, _ = _weaken_into(d, h[i], 0, Sequent())
    return d


def closure_for(h: Hypersequent) -> Derivation | None:
    """Closure derivation from the first closed component of ``h``, if any."""
    for i, s in enumerate(h):
        f = closing_formula(s)
        if f is not None:
            return closure_derivation(h, i, f)
    return None


# ---------------------------------------------------------------------------
# JSON

def derivation_to_json(d: Derivation) -> dict[str, Any]:
    position: dict[str, int] = {}
    if d.component is not None:
        position["component"] = d.component
    if d.formula is not None:
        position["formula"] = d.formula
    return {
        "rule": d.rule.value,
        "conclusion": render_hypersequent(d.conclusion),
        "position": position,
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: Any) -> Derivation:
    """Inverse of ``derivation_to_json``; raises ``ValueError`` on bad input."""
    if not isinstance(obj, dict):
        raise ValueError("derivation node must be an object")
    try:
        rule = RuleId(obj["rule"])
        conclusion = parse_hypersequent(obj["conclusion"])
    except KeyError as e:
        raise ValueError(f"derivation node lacks {e.args[0]!r}") from None
    position = obj.get("position") or {}
    if not isinstance(position, dict):
        raise ValueError("position must be an object")
    comp, form = position.get("component"), position.get("formula")
    for v in (comp, form):
        if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
            raise ValueError("positions are integers")
    premises = obj.get("premises", [])
    if not isinstance(premises, list):
        raise ValueError("premises must be an array")
    return Derivation(rule, conclusion, comp, form,
                      tuple(derivation_from_json(p) for p in premises))


def dumps_derivation(d: Derivation, indent: int | None = 2) -> str:
    return json.dumps(derivation_to_json(d), indent=indent, ensure_ascii=False)


def loads_derivation(text: str) -> Derivation:
    return derivation_from_json(json.loads(text))
