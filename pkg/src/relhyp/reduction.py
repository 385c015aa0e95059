"""Saturation of labelled hypersequents by reducts.

A reduct inverts one logical rule on the rightmost component carrying a
label: it keeps the principal formula and adds the immediate subformulas the
rule would consume.  Reducts are idempotent (they only fire when they add a
formula not already present), which makes saturation terminate.  Rules with
two premises give *branch points*: two alternative reducts, explored
left-first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .calculus import LogicId
from .hyperseq import (
    Label, LabelledHypersequent, closing_formula,
)
from .syntax import And, Box, Diamond, Formula, Implies, Not, Or, render_formula

__all__ = [
    "Reduct", "ClosureEvidence", "ChoiceTrace", "ReductionOutcome",
    "UnsupportedLogic", "UnknownLabel", "sigma_reducts", "deterministic_reduct",
    "branch_point", "find_closure", "is_fully_reduced", "full_reductions",
    "replay", "trace_line", "DECIDABLE",
]

DECIDABLE = (LogicId.K, LogicId.T, LogicId.D)


class UnsupportedLogic(ValueError):
    """The completeness construction is not available for this logic."""

    def __init__(self, logic: LogicId | str):
        logic = LogicId(logic)
        self.logic = logic
        if logic in (LogicId.B, LogicId.S4):
            why = ("the reduction method fails for B and S4: symmetric reducts break "
                   "the invariance of already reduced components, and EW destroys "
                   "information needed by 4-reducts")
        else:
            why = "no cut-free decision construction for S5 is provided here"
        super().__init__(f"cannot decide {logic.value}: {why}; "
                         "use 'check' to verify RB/RS4/RS5 derivations")


class UnknownLabel(KeyError):
    pass


@dataclass(frozen=True)
class Reduct:
    """One reduct of ``source``.

    ``index`` is the position of the rightmost ``target`` component in the
    source.  ``added`` lists ``(side, formula)`` pairs added to that component
    ('L' antecedent, 'R' succedent); for TUnfold the additions land in a copy
    inserted at ``index + 1``.
    """

    rule: str
    target: Label
    principal: Formula
    result: LabelledHypersequent
    index: int
    added: tuple[tuple[str, Formula], ...]

    def describe(self) -> str:
        return trace_line(self)


@dataclass(frozen=True)
class ClosureEvidence:
    component: int
    formula: Formula


@dataclass(frozen=True)
class ChoiceTrace:
    choices: tuple[tuple[int, str], ...] = ()

    def __len__(self) -> int:
        return len(self.choices)


@dataclass(frozen=True)
class ReductionOutcome:
    hypersequent: LabelledHypersequent
    trace: ChoiceTrace
    closure: ClosureEvidence | None
    steps: tuple[Reduct, ...]

    @property
    def is_open(self) -> bool:
        return self.closure is None


def trace_line(r: Reduct) -> str:
    return f"reduce {r.rule} @{r.target}: {render_formula(r.principal)}"


def _check_logic(logic) -> LogicId:
    logic = LogicId(logic)
    if logic not in DECIDABLE:
        raise UnsupportedLogic(logic)
    return logic


def _add(h: LabelledHypersequent, i: int, side: str, fs: list[Formula]) -> LabelledHypersequent:
    s = h.components[i][1]
    return h.replace(i, s.add_left(*fs) if side == "L" else s.add_right(*fs))


def _missing(candidates, present) -> list[Formula]:
    return [f for f in dict.fromkeys(candidates) if f not in present]


def _deterministic_for(h: LabelledHypersequent, sigma: Label, logic: LogicId) -> Iterator[Reduct]:
    i = h.rightmost_index(sigma)
    s = h.components[i][1]
    gamma, delta = set(s.antecedent), set(s.succedent)

    def make(rule, f, adds):
        res = h
        for side, fs in adds:
            if fs:
                res = _add(res, i, side, fs)
        added = tuple((side, g) for side, fs in adds for g in fs)
        return Reduct(rule, sigma, f, res, i, added)

    for f in s.antecedent:
        if type(f) is Not and f.sub not in delta:
            yield make("NegL", f, [("R", [f.sub])])
    for f in s.succedent:
        if type(f) is Not and f.sub not in gamma:
            yield make("NegR", f, [("L", [f.sub])])
    for f in s.antecedent:
        if type(f) is And:
            miss = _missing((f.left, f.right), gamma)
            if miss:
                yield make("AndL", f, [("L", miss)])
    for f in s.succedent:
        if type(f) is Or:
            miss = _missing((f.left, f.right), delta)
            if miss:
                yield make("OrR", f, [("R", miss)])
    for f in s.succedent:
        if type(f) is Implies and (f.left not in gamma or f.right not in delta):
            yield make("ImpR", f, [("L", _missing((f.left,), gamma)),
                                   ("R", _missing((f.right,), delta))])
    if i > 0:
        left = h.components[i - 1][1]
        for f in left.antecedent:
            if type(f) is Box and f.sub not in gamma:
                yield make("BoxL", f, [("L", [f.sub])])
        for f in left.succedent:
            if type(f) is Diamond and f.sub not in delta:
                yield make("DiaR", f, [("R", [f.sub])])
    if logic is LogicId.T:
        for f in s.antecedent:
            if type(f) is Box and f.sub not in gamma:
                copy = s.add_left(f.sub)
                yield Reduct("TUnfold", sigma, f, h.insert(i + 1, sigma, copy), i, (("L", f.sub),))
        for f in s.succedent:
            if type(f) is Diamond and f.sub not in delta:
                copy = s.add_right(f.sub)
                yield Reduct("TUnfold", sigma, f, h.insert(i + 1, sigma, copy), i, (("R", f.sub),))


def _branches_for(h: LabelledHypersequent, sigma: Label) -> Iterator[tuple[Reduct, Reduct]]:
    i = h.rightmost_index(sigma)
    s = h.components[i][1]
    gamma, delta = set(s.antecedent), set(s.succedent)

    def alt(rule, f, side, g):
        return Reduct(rule, sigma, f, _add(h, i, side, [g]), i, ((side, g),))

    for f in s.succedent:
        if type(f) is And and f.left not in delta and f.right not in delta:
            yield alt("AndR-left", f, "R", f.left), alt("AndR-right", f, "R", f.right)
    for f in s.antecedent:
        if type(f) is Or and f.left not in gamma and f.right not in gamma:
            yield alt("OrL-left", f, "L", f.left), alt("OrL-right", f, "L", f.right)
    for f in s.antecedent:
        if type(f) is Implies and f.left not in delta and f.right not in gamma:
            yield alt("ImpL-left", f, "R", f.left), alt("ImpL-right", f, "L", f.right)


def sigma_reducts(h: LabelledHypersequent, sigma: Label, logic: LogicId | str) -> list[Reduct]:
    """Every applicable reduct of the rightmost ``sigma`` component.

    Branch points contribute both alternatives.
    """
    logic = _check_logic(logic)
    if h.rightmost_index(sigma) is None:
        raise UnknownLabel(sigma)
    out = list(_deterministic_for(h, sigma, logic))
    for left, right in _branches_for(h, sigma):
        out += [left, right]
    return out


def deterministic_reduct(h: LabelledHypersequent, logic: LogicId | str) -> Reduct | None:
    """First one-alternative reduct in the fixed order (leftmost label first)."""
    logic = _check_logic(logic)
    for sigma in h.distinct_labels():
        for r in _deterministic_for(h, sigma, logic):
            return r
    return None


def branch_point(h: LabelledHypersequent, logic: LogicId | str) -> tuple[Reduct, Reduct] | None:
    _check_logic(logic)
    for sigma in h.distinct_labels():
        for pair in _branches_for(h, sigma):
            return pair
    return None


def find_closure(h: LabelledHypersequent) -> ClosureEvidence | None:
    for i, (_, s) in enumerate(h):
        f = closing_formula(s)
        if f is not None:
            return ClosureEvidence(i, f)
    return None


def is_fully_reduced(h: LabelledHypersequent, logic: LogicId | str) -> bool:
    return deterministic_reduct(h, logic) is None and branch_point(h, logic) is None


def full_reductions(h: LabelledHypersequent, logic: LogicId | str,
                    trace: Callable[[str], None] | None = None) -> Iterator[ReductionOutcome]:
    """Depth-first enumeration of all saturations of ``h``.

    Each outcome is either fully reduced and open, or stops at the first
    closed component (``closure`` set), meaning that branch is provable.
    """
    logic = _check_logic(logic)

    def walk(h, choices, steps):
        while True:
            ev = find_closure(h)
            if ev is not None:
                yield ReductionOutcome(h, ChoiceTrace(choices), ev, steps)
                return
            r = deterministic_reduct(h, logic)
            if r is None:
                break
            if trace:
                trace(trace_line(r))
            steps += (r,)
            h = r.result
        pair = branch_point(h, logic)
        if pair is None:
            yield ReductionOutcome(h, ChoiceTrace(choices), None, steps)
            return
        bid = len(choices)
        for alt, r in zip(("left", "right"), pair):
            if trace:
                trace(trace_line(r))
            yield from walk(r.result, choices + ((bid, alt),), steps + (r,))

    yield from walk(h, (), ())


def replay(h: LabelledHypersequent, logic: LogicId | str, trace: ChoiceTrace) -> ReductionOutcome:
    """Re-run saturation following the recorded branch choices."""
    logic = _check_logic(logic)
    choices = list(trace.choices)
    steps: tuple[Reduct, ...] = ()
    taken: list[tuple[int, str]] = []
    while True:
        ev = find_closure(h)
        if ev is not None:
            return ReductionOutcome(h, ChoiceTrace(tuple(taken)), ev, steps)
        r = deterministic_reduct(h, logic)
        if r is None:
            pair = branch_point(h, logic)
            if pair is None:
                return ReductionOutcome(h, ChoiceTrace(tuple(taken)), None, steps)
            if not choices:
                raise ValueError("trace ended before saturation finished")
            bid, alt = choices.pop(0)
            taken.append((bid, alt))
            r = pair[0] if alt == "left" else pair[1]
        steps += (r,)
        h = r.result
