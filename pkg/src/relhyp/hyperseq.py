"""Sequents, hypersequents and their labelled form.

Labels are finite sequences of naturals rendered ``0.1.1``.  A labelled
hypersequent pairs each component with a label; the labels along it form a
branch of the tree order (immediate children, or repeats under the
reflexive reading used for T).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .syntax import Formula, FormulaParser, render_formula

__all__ = [
    "Label", "Sequent", "Hypersequent", "LabelledHypersequent", "Relation",
    "label_initial", "label_relation", "component_at", "extends", "is_closed",
    "closing_formula", "same_multiset", "parse_hypersequent", "render_sequent",
    "render_hypersequent", "render_labelled",
]


@dataclass(frozen=True, order=True)
class Label:
    digits: tuple[int, ...]

    def __post_init__(self):
        if not self.digits:
            raise ValueError("a label needs at least one digit")

    @classmethod
    def parse(cls, text: str) -> "Label":
        return cls(tuple(int(d) for d in text.split(".")))

    @classmethod
    def root(cls) -> "Label":
        return cls((0,))

    def child(self, n: int) -> "Label":
        return Label(self.digits + (n,))

    @property
    def parent(self) -> "Label | None":
        return Label(self.digits[:-1]) if len(self.digits) > 1 else None

    def is_prefix_of(self, other: "Label") -> bool:
        return other.digits[:len(self.digits)] == self.digits

    def __str__(self) -> str:
        return ".".join(map(str, self.digits))

    def __repr__(self) -> str:
        return f"Label({self})"


class Relation(Enum):
    R = "R"
    R_REFL = "R_refl"
    R_TRANS = "R_trans"
    R_RT = "R_rt"


def label_relation(sigma: Label, tau: Label, kind: Relation | str) -> bool:
    """Tree relations on labels: successor order and its closures."""
    kind = Relation(kind)
    n, m = len(sigma.digits), len(tau.digits)
    if kind is Relation.R:
        return m == n + 1 and sigma.is_prefix_of(tau)
    if kind is Relation.R_REFL:
        return sigma == tau or (m == n + 1 and sigma.is_prefix_of(tau))
    if kind is Relation.R_TRANS:
        return m > n and sigma.is_prefix_of(tau)
    return sigma.is_prefix_of(tau)


def same_multiset(a: Sequence[Formula], b: Sequence[Formula]) -> bool:
    return len(a) == len(b) and Counter(a) == Counter(b)


@dataclass(frozen=True)
class Sequent:
    """``antecedent => succedent``.

    Both sides are kept as ordered tuples so that printing is stable; rule
    checking compares them as multisets, reduction queries as sets.
    """

    antecedent: tuple[Formula, ...] = ()
    succedent: tuple[Formula, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.antecedent and not self.succedent

    def size(self) -> int:
        return len(self.antecedent) + len(self.succedent)

    def add_left(self, *fs: Formula) -> "Sequent":
        return Sequent(self.antecedent + fs, self.succedent)

    def add_right(self, *fs: Formula) -> "Sequent":
        return Sequent(self.antecedent, self.succedent + fs)

    def same_as(self, other: "Sequent") -> bool:
        """Multiset equality of both sides."""
        return (same_multiset(self.antecedent, other.antecedent)
                and same_multiset(self.succedent, other.succedent))

    def extends(self, other: "Sequent") -> bool:
        """Set inclusion of ``other``'s sides in ours."""
        return (set(other.antecedent) <= set(self.antecedent)
                and set(other.succedent) <= set(self.succedent))

    def __str__(self) -> str:
        return render_sequent(self)


Hypersequent = tuple[Sequent, ...]


@dataclass(frozen=True)
class LabelledHypersequent:
    components: tuple[tuple[Label, Sequent], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a hypersequent has at least one component")

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[tuple[Label, Sequent]]:
        return iter(self.components)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(lab for lab, _ in self.components)

    def distinct_labels(self) -> list[Label]:
        """Labels in order of first occurrence."""
        return list(dict.fromkeys(self.labels))

    @property
    def sequents(self) -> Hypersequent:
        return tuple(s for _, s in self.components)

    def unlabelled(self) -> Hypersequent:
        return self.sequents

    @property
    def last_label(self) -> Label:
        return self.components[-1][0]

    def rightmost_index(self, sigma: Label) -> int | None:
        for i in range(len(self.components) - 1, -1, -1):
            if self.components[i][0] == sigma:
                return i
        return None

    def prefix_through(self, sigma: Label) -> "LabelledHypersequent":
        """Components up to and including the rightmost ``sigma`` one."""
        i = self.rightmost_index(sigma)
        if i is None:
            raise KeyError(sigma)
        return LabelledHypersequent(self.components[:i + 1])

    def replace(self, index: int, seq: Sequent) -> "LabelledHypersequent":
        comps = list(self.components)
        comps[index] = (comps[index][0], seq)
        return LabelledHypersequent(tuple(comps))

    def insert(self, index: int, label: Label, seq: Sequent) -> "LabelledHypersequent":
        comps = list(self.components)
        comps.insert(index, (label, seq))
        return LabelledHypersequent(tuple(comps))

    def append(self, label: Label, seq: Sequent) -> "LabelledHypersequent":
        return LabelledHypersequent(self.components + ((label, seq),))

    def is_branch(self, reflexive: bool = False) -> bool:
        kind = Relation.R_REFL if reflexive else Relation.R
        labs = self.labels
        return all(label_relation(a, b, kind) for a, b in zip(labs, labs[1:]))

    def __str__(self) -> str:
        return render_labelled(self)


def label_initial(h: Hypersequent) -> LabelledHypersequent:
    """Label component ``i`` (1-based) with ``i`` zeros: 0, 0.0, 0.0.0, ..."""
    if not h:
        raise ValueError("empty hypersequent")
    return LabelledHypersequent(tuple(
        (Label((0,) * (i + 1)), s) for i, s in enumerate(h)))


def component_at(h: LabelledHypersequent, sigma: Label) -> Sequent:
    i = h.rightmost_index(sigma)
    return Sequent() if i is None else h.components[i][1]


def extends(h2: LabelledHypersequent, h1: LabelledHypersequent) -> bool:
    """Whether every label of ``h1`` has its component extended in ``h2``."""
    return all(component_at(h2, sigma).extends(component_at(h1, sigma))
               for sigma in h1.distinct_labels())


def closing_formula(s: Sequent) -> Formula | None:
    """First antecedent formula that also occurs in the succedent."""
    right = set(s.succedent)
    for f in s.antecedent:
        if f in right:
            return f
    return None


def is_closed(s: Sequent) -> bool:
    return closing_formula(s) is not None


# ---------------------------------------------------------------------------
# Text form

def _formula_list(parser: FormulaParser, stops: tuple[str, ...]) -> tuple[Formula, ...]:
    if parser.peek.kind in stops:
        return ()
    fs = [parser.formula()]
    while parser.peek.kind == "comma":
        parser.advance()
        fs.append(parser.formula())
    return tuple(fs)


def parse_hypersequent(text: str) -> Hypersequent:
    """Parse ``A, B => C ; D =>`` into a tuple of sequents."""
    parser = FormulaParser(text)
    comps = []
    while True:
        ant = _formula_list(parser, ("seq",))
        if parser.peek.kind != "seq":
            parser.fail("',' or '=>'")
        parser.advance()
        succ = _formula_list(parser, ("semi", "eof"))
        comps.append(Sequent(ant, succ))
        if parser.peek.kind == "semi":
            parser.advance()
            continue
        if parser.peek.kind != "eof":
            parser.fail("',', ';' or end of input")
        return tuple(comps)


def render_sequent(s: Sequent) -> str:
    left = ", ".join(render_formula(f) for f in s.antecedent)
    right = ", ".join(render_formula(f) for f in s.succedent)
    return " ".join(part for part in (left, "=>", right) if part)


def render_hypersequent(h: Iterable[Sequent]) -> str:
    return " ; ".join(render_sequent(s) for s in h)


def render_labelled(h: LabelledHypersequent) -> str:
    return " ; ".join(f"{{{lab}}} {render_sequent(s)}" for lab, s in h)
