"""Decision procedure for K, T and D.

The search saturates the labelled input, then grows a tree of successor
hypersequents: every falsified box on the right (and every diamond on the
left) of a node's rightmost component gets a child component.  If some
saturation of every node stays open the tree yields a countermodel;
otherwise each failure is turned back into a cut-free derivation by
inverting the reducts and successor steps that led to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .calculus import (
    Derivation, LogicId, RuleId, closure_derivation, extend_right,
)
from .hyperseq import (
    Hypersequent, Label, LabelledHypersequent, Sequent, label_initial,
)
from .reduction import (
    DECIDABLE, Reduct, UnsupportedLogic, branch_point, deterministic_reduct,
    find_closure, trace_line,
)
from .semantics import KripkeModel
from .syntax import Atom, Box, Diamond, Formula, modal_depth, render_formula

__all__ = [
    "ChildSpec", "TreeNode", "SearchTree", "Provable", "Refutable",
    "SearchResult", "NotReduced", "InconsistentTree", "UnsupportedLogic",
    "successors", "decide", "build_model", "reconstruct_derivation",
]


class NotReduced(ValueError):
    pass


class InconsistentTree(RuntimeError):
    pass


@dataclass(frozen=True)
class ChildSpec:
    """A child ``label`` of a tree node.

    ``kind`` is ``"box"`` (witness for a falsified ``[]formula``),
    ``"diamond"`` (witness for a true ``<>formula``) or ``"dummy"`` (D only:
    keeps the frame serial).
    """

    label: Label
    kind: str
    formula: Formula | None = None

    def new_component(self) -> Sequent:
        if self.kind == "box":
            return Sequent((), (self.formula,))
        if self.kind == "diamond":
            return Sequent((self.formula,), ())
        return Sequent()

    def __str__(self) -> str:
        if self.formula is None:
            return f"{self.label} (serial)"
        return f"{self.label} {self.kind}: {render_formula(self.formula)}"


@dataclass(frozen=True)
class TreeNode:
    hypersequent: LabelledHypersequent
    children: tuple[ChildSpec, ...]

    @property
    def label(self) -> Label:
        return self.hypersequent.last_label

    @property
    def sequent(self) -> Sequent:
        return self.hypersequent.components[-1][1]


@dataclass
class SearchTree:
    nodes: dict[Label, TreeNode]
    root: Label = field(default_factory=Label.root)
    extra_loops: frozenset[Label] = frozenset()

    def sequent(self, sigma: Label) -> Sequent:
        return self.nodes[sigma].sequent

    def check_consistency(self) -> None:
        """Rightmost components of a label agree across all node hypersequents."""
        seen: dict[Label, Sequent] = {}
        for node in self.nodes.values():
            h = node.hypersequent
            for sigma in h.distinct_labels():
                s = h.components[h.rightmost_index(sigma)][1]
                if sigma in seen and not seen[sigma].same_as(s):
                    raise InconsistentTree(f"label {sigma} has two different components")
                seen.setdefault(sigma, s)
        for sigma in self.nodes:
            if sigma.parent is not None and sigma.parent not in self.nodes:
                raise InconsistentTree(f"{sigma} has no parent node")


@dataclass
class Provable:
    derivation: Derivation


@dataclass
class Refutable:
    model: KripkeModel
    tree: SearchTree
    assignment: tuple[str, ...]


SearchResult = Provable | Refutable


# ---------------------------------------------------------------------------
# Successors

def successors(h: LabelledHypersequent, logic: LogicId | str) -> list[ChildSpec]:
    """Children of the node whose hypersequent is ``h`` (rightmost label)."""
    logic = LogicId(logic)
    if logic not in DECIDABLE:
        raise UnsupportedLogic(logic)
    if find_closure(h) is not None or deterministic_reduct(h, logic) or branch_point(h, logic):
        raise NotReduced("successors need a fully reduced, open hypersequent")
    sigma, s = h.components[-1]
    specs = []
    for f in dict.fromkeys(f for f in s.succedent if type(f) is Box):
        specs.append(ChildSpec(sigma.child(len(specs) + 1), "box", f.sub))
    for f in dict.fromkeys(f for f in s.antecedent if type(f) is Diamond):
        specs.append(ChildSpec(sigma.child(len(specs) + 1), "diamond", f.sub))
    if logic is LogicId.D and not specs and _needs_dummy(s):
        specs.append(ChildSpec(sigma.child(1), "dummy"))
    return specs


def _needs_dummy(s: Sequent) -> bool:
    return (any(type(f) is Box for f in s.antecedent)
            or any(type(f) is Diamond for f in s.succedent))


# ---------------------------------------------------------------------------
# Derivation building blocks

def _with(h: Hypersequent, i: int, s: Sequent) -> Hypersequent:
    return h[:i] + (s,) + h[i + 1:]


def _contract(d: Derivation, target: Hypersequent, i: int, side: str, f: Formula) -> Derivation:
    """Contract one copy of ``f`` so the conclusion becomes ``target``."""
    s = target[i]
    fs = s.antecedent if side == "L" else s.succedent
    rule = RuleId.CL if side == "L" else RuleId.CR
    return Derivation(rule, target, i, fs.index(f), (d,))


def _doubled(h: Hypersequent, i: int, side: str, f: Formula) -> Hypersequent:
    s = h[i]
    return _with(h, i, s.add_left(f) if side == "L" else s.add_right(f))


def _invert(before: LabelledHypersequent, r: Reduct, d: Derivation) -> Derivation:
    """From a derivation of ``r.result`` derive ``before``."""
    h = before.unlabelled()
    i = r.index
    f = r.principal
    if r.rule == "TUnfold":
        (side, _), = r.added
        # premise: ... s ; s + φ ...  ->  □L / ◇R  ->  contraction  ->  EC
        doubled = _doubled(h, i, side, f)
        rule = RuleId.BoxL if side == "L" else RuleId.DiaR
        step = Derivation(rule, doubled[:i + 1] + (h[i],) + doubled[i + 1:], i,
                          _index_last(doubled[i], side, f), (d,))
        step = _contract(step, h[:i + 1] + (h[i],) + h[i + 1:], i, side, f)
        return Derivation(RuleId.EC, h, i, None, (step,))
    if r.rule in ("BoxL", "DiaR"):
        side = "L" if r.rule == "BoxL" else "R"
        doubled = _doubled(h, i - 1, side, f)
        rule = RuleId.BoxL if side == "L" else RuleId.DiaR
        step = Derivation(rule, doubled, i - 1, _index_last(doubled[i - 1], side, f), (d,))
        return _contract(step, h, i - 1, side, f)
    if r.rule in ("NegL", "NegR"):
        side = "L" if r.rule == "NegL" else "R"
        doubled = _doubled(h, i, side, f)
        rule = RuleId.NegL if side == "L" else RuleId.NegR
        step = Derivation(rule, doubled, i, _index_last(doubled[i], side, f), (d,))
        return _contract(step, h, i, side, f)
    if r.rule in ("AndL", "OrR"):
        side = "L" if r.rule == "AndL" else "R"
        added = [g for _, g in r.added]
        # peel the added subformulas off one at a time, replacing each by f
        current = d
        cur_h = r.result.unlabelled()
        for g in reversed(added):
            s = cur_h[i]
            fs = list(s.antecedent if side == "L" else s.succedent)
            del fs[len(fs) - 1 - fs[::-1].index(g)]
            fs.append(f)
            s = Sequent(tuple(fs), s.succedent) if side == "L" else Sequent(s.antecedent, tuple(fs))
            conc = _with(cur_h, i, s)
            if side == "L":
                rule = RuleId.AndL1 if g == f.left else RuleId.AndL2
            else:
                rule = RuleId.OrR1 if g == f.left else RuleId.OrR2
            current = Derivation(rule, conc, i, len(fs) - 1, (current,))
            cur_h = _with(conc, i, _drop_last(conc[i], side, f))
            current = _contract(current, cur_h, i, side, f)
        assert all(a.same_as(b) for a, b in zip(cur_h, h))
        return _retarget(current, h)
    if r.rule == "ImpR":
        # make sure the premise holds both φ left and ψ right as extra copies
        cur = d
        cur_h = r.result.unlabelled()
        added = set(r.added)
        if ("L", f.left) not in added:
            cur_h = _doubled(cur_h, i, "L", f.left)
            cur = Derivation(RuleId.WL, cur_h, i, len(cur_h[i].antecedent) - 1, (cur,))
        if ("R", f.right) not in added:
            cur_h = _doubled(cur_h, i, "R", f.right)
            cur = Derivation(RuleId.WR, cur_h, i, len(cur_h[i].succedent) - 1, (cur,))
        doubled = _doubled(h, i, "R", f)
        step = Derivation(RuleId.ImpR, doubled, i, len(doubled[i].succedent) - 1, (cur,))
        return _contract(step, h, i, "R", f)
    raise AssertionError(f"no inversion for {r.rule}")


def _index_last(s: Sequent, side: str, f: Formula) -> int:
    fs = s.antecedent if side == "L" else s.succedent
    assert fs[-1] == f
    return len(fs) - 1


def _drop_last(s: Sequent, side: str, f: Formula) -> Sequent:
    if side == "L":
        assert s.antecedent[-1] == f
        return Sequent(s.antecedent[:-1], s.succedent)
    assert s.succedent[-1] == f
    return Sequent(s.antecedent, s.succedent[:-1])


def _retarget(d: Derivation, h: Hypersequent) -> Derivation:
    """Same node, conclusion rewritten to the multiset-equal ``h``."""
    if d.conclusion == h:
        return d
    s = d.conclusion[d.component]
    t = h[d.component]
    fs, ts = (s.antecedent, t.antecedent) if d.rule == RuleId.CL else (s.succedent, t.succedent)
    return Derivation(d.rule, h, d.component, ts.index(fs[d.formula]), d.premises)


def _join(before: LabelledHypersequent, left: Reduct, right: Reduct,
          d_left: Derivation, d_right: Derivation) -> Derivation:
    h = before.unlabelled()
    i = left.index
    f = left.principal
    rule = {"AndR": RuleId.AndR, "OrL": RuleId.OrL, "ImpL": RuleId.ImpL}[left.rule.split("-")[0]]
    side = "R" if rule is RuleId.AndR else "L"
    doubled = _doubled(h, i, side, f)
    step = Derivation(rule, doubled, i, _index_last(doubled[i], side, f), (d_left, d_right))
    return _contract(step, h, i, side, f)


def _invert_child(parent: LabelledHypersequent, spec: ChildSpec, d: Derivation) -> Derivation:
    """From a derivation of ``parent ; new component`` derive ``parent``."""
    h = parent.unlabelled()
    i = len(h) - 1
    if spec.kind == "dummy":
        return Derivation(RuleId.Drop, h, None, None, (d,))
    if spec.kind == "box":
        f = Box(spec.formula)
        doubled = _doubled(h, i, "R", f)
        step = Derivation(RuleId.BoxR, doubled, i, len(doubled[i].succedent) - 1, (d,))
        return _contract(step, h, i, "R", f)
    f = Diamond(spec.formula)
    doubled = _doubled(h, i, "L", f)
    step = Derivation(RuleId.DiaL, doubled, i, len(doubled[i].antecedent) - 1, (d,))
    return _contract(step, h, i, "L", f)


# ---------------------------------------------------------------------------
# Search

@dataclass
class _Open:
    hypersequent: LabelledHypersequent
    nodes: dict[Label, TreeNode]
    loops: set[Label]


class _Search:
    def __init__(self, logic: LogicId, trace: Callable[[str], None] | None):
        self.logic = logic
        self.trace = trace

    def emit(self, line: str):
        if self.trace:
            self.trace(line)

    def solve(self, h: LabelledHypersequent, node_labels: list[Label]):
        """Return ``_Open`` or a ``Derivation`` of ``h`` (unlabelled)."""
        chain: list[tuple[LabelledHypersequent, Reduct]] = []
        failure = None
        while True:
            ev = find_closure(h)
            if ev is not None:
                self.emit(f"closed @{h.components[ev.component][0]}: {render_formula(ev.formula)}")
                failure = closure_derivation(h.unlabelled(), ev.component, ev.formula)
                break
            r = deterministic_reduct(h, self.logic)
            if r is None:
                break
            self.emit(trace_line(r))
            chain.append((h, r))
            h = r.result
        if failure is None:
            pair = branch_point(h, self.logic)
            if pair is not None:
                left, right = pair
                self.emit(trace_line(left))
                res_l = self.solve(left.result, node_labels)
                if isinstance(res_l, _Open):
                    return res_l
                self.emit(trace_line(right))
                res_r = self.solve(right.result, node_labels)
                if isinstance(res_r, _Open):
                    return res_r
                failure = _join(h, left, right, res_l, res_r)
            else:
                out = self.expand(h, node_labels)
                if isinstance(out, _Open):
                    return out
                failure = out
        for before, r in reversed(chain):
            failure = _invert(before, r, failure)
        return failure

    def expand(self, h: LabelledHypersequent, node_labels: list[Label]):
        nodes: dict[Label, TreeNode] = {}
        loops: set[Label] = set()
        for sigma in node_labels:
            prefix = h.prefix_through(sigma)
            specs = successors(prefix, self.logic)
            if sigma != h.last_label:
                # σ.0 already keeps the frame serial here
                specs = [c for c in specs if c.kind != "dummy"]
            nodes[sigma] = TreeNode(prefix, tuple(specs))
            parent_depth = max((modal_depth(f) for f in _formulas(prefix.components[-1][1])), default=0)
            for spec in specs:
                self.emit(f"successor {spec}")
                child = prefix.append(spec.label, spec.new_component())
                res = self.solve(child, [spec.label])
                if not isinstance(res, _Open):
                    d = _invert_child(prefix, spec, res)
                    return extend_right(d, h.unlabelled())
                new_depth = max((modal_depth(f) for lab, s in res.hypersequent
                                 if lab == spec.label for f in _formulas(s)), default=0)
                assert new_depth < parent_depth, "successor did not lower the modal depth"
                nodes.update(res.nodes)
                loops |= res.loops
            is_last = sigma == h.last_label
            if self.logic is LogicId.D and not specs and is_last:
                loops.add(sigma)
        return _Open(h, nodes, loops)


def _formulas(s: Sequent):
    return s.antecedent + s.succedent


def decide(h: Hypersequent, logic: LogicId | str,
           trace: Callable[[str], None] | None = None) -> SearchResult:
    """Prove ``h`` cut-free or return a countermodel for ``logic``."""
    logic = LogicId(logic)
    if logic not in DECIDABLE:
        raise UnsupportedLogic(logic)
    labelled = label_initial(tuple(h))
    search = _Search(logic, trace)
    res = search.solve(labelled, list(labelled.labels))
    if isinstance(res, _Open):
        tree = SearchTree(res.nodes, extra_loops=frozenset(res.loops))
        model = build_model(tree, logic)
        assignment = tuple(str(lab) for lab in labelled.labels)
        return Refutable(model, tree, assignment)
    return Provable(res)


def build_model(tree: SearchTree, logic: LogicId | str) -> KripkeModel:
    logic = LogicId(logic)
    tree.check_consistency()
    labels = sorted(tree.nodes)
    edges = set()
    for sigma in labels:
        parent = sigma.parent
        if parent is not None:
            edges.add((str(parent), str(sigma)))
        if logic is LogicId.T or (logic is LogicId.D and sigma in tree.extra_loops):
            edges.add((str(sigma), str(sigma)))
    valuation: dict[str, set[str]] = {}
    for sigma in labels:
        for f in tree.sequent(sigma).antecedent:
            if type(f) is Atom:
                valuation.setdefault(f.name, set()).add(str(sigma))
    return KripkeModel.build((str(s) for s in labels), edges, valuation)


def reconstruct_derivation(h: Hypersequent, logic: LogicId | str) -> Derivation:
    """Derivation of ``h`` from a failed search; raises if ``h`` is refutable."""
    res = decide(h, logic)
    if not isinstance(res, Provable):
        raise RuntimeError("search did not fail: the hypersequent has a countermodel")
    return res.derivation
