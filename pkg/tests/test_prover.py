import random

import pytest

from relhyp.calculus import RuleId, check_derivation
from relhyp.hyperseq import Label, label_initial, parse_hypersequent as H
from relhyp.prover import (
    Provable, Refutable, UnsupportedLogic, build_model, decide, reconstruct_derivation, successors,
)
from relhyp.reduction import full_reductions
from relhyp.semantics import evaluate, frame_check, frame_property_for, is_counterexample

from support import random_hypersequent


def shape(m):
    return (sorted(m.worlds), sorted(m.edges), {p: sorted(v) for p, v in m.valuation.items() if v})


def test_k_example_model():
    res = decide(H("[]~(p&q) => []~q ; p =>"), "K")
    assert isinstance(res, Refutable)
    assert shape(res.model) == (["0", "0.0", "0.1"], [("0", "0.0"), ("0", "0.1")],
                                {"p": ["0.0"], "q": ["0.1"]})
    assert res.assignment == ("0", "0.0")


def test_t_example_model():
    res = decide(H("[]~(p&q), p => []~q ; p =>"), "T")
    assert shape(res.model) == (
        ["0", "0.0", "0.1"],
        [("0", "0"), ("0", "0.0"), ("0", "0.1"), ("0.0", "0.0"), ("0.1", "0.1")],
        {"p": ["0", "0.0"], "q": ["0.1"]})


def test_d_example_model():
    res = decide(H("[][]p => []p"), "D")
    assert shape(res.model) == (["0", "0.1", "0.1.1"],
                                [("0", "0.1"), ("0.1", "0.1.1"), ("0.1.1", "0.1.1")],
                                {"p": ["0.1.1"]})


@pytest.mark.parametrize("text, provable", [
    ("=> []p -> p", {"K": False, "T": True, "D": False}),
    ("=> []p -> <>p", {"K": False, "T": True, "D": True}),
    ("=> [](p->q) -> ([]p -> []q)", {"K": True, "T": True, "D": True}),
    ("=> <>(p | q) -> <>p | <>q", {"K": True, "T": True, "D": True}),
    ("=> []p -> [][]p", {"K": False, "T": False, "D": False}),
    ("=> ~[]p | ~[]~p", {"K": False, "T": True, "D": True}),
    ("=> ; => p", {"K": False, "T": False, "D": False}),
    ("[]p => ; => p", {"K": True, "T": True, "D": True}),
])
def test_verdicts(text, provable):
    h = H(text)
    for logic, expected in provable.items():
        res = decide(h, logic)
        assert isinstance(res, Provable) is expected, logic
        if expected:
            assert check_derivation(res.derivation, logic).valid
            assert res.derivation.conclusion == h
        else:
            assert is_counterexample(res.model, res.assignment, h)


def test_derivations_use_only_their_logic():
    d = decide(H("=> []p -> p"), "T").derivation
    assert RuleId.EC in d.rules_used()
    assert not check_derivation(d, "K").valid
    d = decide(H("=> []p -> <>p"), "D").derivation
    assert RuleId.Drop in d.rules_used()
    assert reconstruct_derivation(H("p => p"), "K").rule is RuleId.Axiom
    with pytest.raises(RuntimeError):
        reconstruct_derivation(H("=> p"), "K")


def test_successor_numbering():
    h = label_initial(H("<>r => []p, []q, []p"))
    specs = successors(h, "K")
    assert [(str(s.label), s.kind) for s in specs] == [("0.1", "box"), ("0.2", "box"), ("0.3", "diamond")]
    assert successors(label_initial(H("[]p =>")), "K") == []
    (dummy,) = successors(label_initial(H("[]p =>")), "D")
    assert dummy.kind == "dummy"


def test_unsupported_logics():
    for logic in ("B", "S4", "S5"):
        with pytest.raises(UnsupportedLogic):
            decide(H("=> p"), logic)


def check_refutation(h, logic, res):
    m = res.model
    assert is_counterexample(m, res.assignment, h)
    assert all(frame_check(m, p) for p in frame_property_for(logic))
    res.tree.check_consistency()
    for sigma in res.tree.nodes:
        s = res.tree.sequent(sigma)
        w = str(sigma)
        assert all(evaluate(m, w, f) for f in s.antecedent)
        assert not any(evaluate(m, w, f) for f in s.succedent)


@pytest.mark.parametrize("logic", ["K", "T", "D"])
def test_random_verdicts_are_verified(logic):
    rng = random.Random(logic + "prover")
    kinds = set()
    for _ in range(150):
        h = random_hypersequent(rng, max_len=2, depth=3, width=2, atoms=("p", "q"))
        res = decide(h, logic)
        kinds.add(type(res))
        if isinstance(res, Provable):
            report = check_derivation(res.derivation, logic)
            assert report.valid, str(report)
            assert res.derivation.conclusion == h
        else:
            check_refutation(h, logic, res)
    assert kinds == {Provable, Refutable}


def test_provable_iff_every_branch_closes_at_root():
    rng = random.Random(4)
    for _ in range(100):
        h = random_hypersequent(rng, max_len=2, depth=2, atoms=("p", "q"))
        propositional = all(type(f).__name__ not in ("Box", "Diamond")
                            for s in h for f in s.antecedent + s.succedent)
        if not propositional:
            continue
        closed = all(not o.is_open for o in full_reductions(label_initial(h), "K"))
        assert closed == isinstance(decide(h, "K"), Provable)


def test_trace_lines():
    lines = []
    decide(H("[]~(p&q) => []~q ; p =>"), "K", trace=lines.append)
    assert "successor 0.1 box: ~q" in lines
    assert lines[0] == "reduce BoxL @0.0: []~(p & q)"


def test_build_model_loops_for_t():
    res = decide(H("=> []p"), "T")
    m = build_model(res.tree, "T")
    assert all((w, w) in m.edges for w in m.worlds)
    assert Label.parse("0.1") in res.tree.nodes


@pytest.mark.parametrize("logic", ["K", "T", "D"])
def test_decide_agrees_with_oracle(logic):
    from relhyp.semantics import oracle_search
    rng = random.Random(logic + "oracle")
    for _ in range(80):
        h = random_hypersequent(rng, max_len=2, depth=3, width=2, atoms=("p", "q"))
        refuted = isinstance(decide(h, logic), Refutable)
        assert refuted == (oracle_search(h, logic) is not None)
