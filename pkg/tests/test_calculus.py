import json
import random

import pytest

from relhyp.calculus import (
    BASE_RULES, LogicId, RuleId, StepError, check_derivation, check_step,
    closure_for, derivation_from_json, dumps_derivation, loads_derivation, rules_of,
)
from relhyp.hyperseq import Sequent, parse_hypersequent as H
from relhyp.semantics import has_counterexample

from support import (
    enumerate_models, node, random_hypersequent, rb_derivation, rs4_derivation,
    rs5_derivation,
)


def test_rule_sets():
    assert RuleId.Cut not in BASE_RULES
    assert rules_of("K") == BASE_RULES
    assert rules_of("T") - BASE_RULES == {RuleId.EC}
    assert rules_of("S4") - BASE_RULES == {RuleId.EC, RuleId.EW}
    assert rules_of("S5") - BASE_RULES == {RuleId.EC, RuleId.EW, RuleId.EE}
    assert rules_of("D") - BASE_RULES == {RuleId.Drop}
    assert rules_of("B") - BASE_RULES == {RuleId.Sym}
    assert RuleId.Cut in rules_of("K", allow_cut=True)
    assert LogicId.parse("s4") is LogicId.S4


@pytest.mark.parametrize("conclusion, rule, pos, premises", [
    ("p => p", "Axiom", (None, None), []),
    ("p, q => p", "WL", (0, 1), ["p => p"]),
    ("p => p, q", "WR", (0, 1), ["p => p"]),
    ("p => q", "CL", (0, 0), ["p, p => q"]),
    ("~p => q", "NegL", (0, 0), ["=> q, p"]),
    ("=> ~p", "NegR", (0, 0), ["p =>"]),
    ("p & q => p", "AndL1", (0, 0), ["p => p"]),
    ("p & q => q", "AndL2", (0, 0), ["q => q"]),
    ("=> p & q", "AndR", (0, 0), ["=> p", "=> q"]),
    ("p | q =>", "OrL", (0, 0), ["p =>", "q =>"]),
    ("=> p | q", "OrR2", (0, 0), ["=> q"]),
    ("p -> q =>", "ImpL", (0, 0), ["=> p", "q =>"]),
    ("=> p -> q", "ImpR", (0, 0), ["p => q"]),
    ("[]p, r => ; => q", "BoxL", (0, 0), ["r => ; p => q"]),
    ("=> <>p ; q =>", "DiaR", (0, 0), ["=> ; q => p"]),
    ("r => ; => []p", "BoxR", (1, 0), ["r => ; => ; => p"]),
    ("r => ; <>p =>", "DiaL", (1, 0), ["r => ; => ; p =>"]),
    ("p => ; =>", "EWR", (None, None), ["p =>"]),
    ("=> ; p =>", "EWL", (None, None), ["p =>"]),
    ("p => q", "EC", (0, None), ["p => q ; p => q"]),
    ("p => ; => ; q =>", "EW", (1, None), ["p => ; q =>"]),
    ("q => ; p =>", "EE", (0, None), ["p => ; q =>"]),
    ("p => ; q => ; r =>", "Sym", (None, None), ["r => ; q => ; p =>"]),
    ("p =>", "Drop", (None, None), ["p => ; =>"]),
    ("p, s => q", "Cut", (0, None), ["p => r", "r, s => q"]),
])
def test_valid_steps(conclusion, rule, pos, premises):
    assert check_step(H(conclusion), rule, pos, [H(x) for x in premises])


@pytest.mark.parametrize("conclusion, rule, pos, premises, reason", [
    ("p => q", "Axiom", (None, None), [], "axiom"),
    ("=> []p ; q =>", "BoxR", (0, 0), ["=> ; => p ; q =>"], "rightmost"),
    ("=> []p", "BoxR", (0, 0), ["=> ; p =>"], "new component"),
    ("p => ; q =>", "EW", (1, None), ["p =>"], "empty"),
    ("p => q", "EC", (0, None), ["p => q ; q => p"], "differs"),
    ("[]p => ; => q", "BoxL", (0, 0), ["=> ; => q"], "right neighbour"),
    ("=> p & q", "AndR", (0, 0), ["=> p"], "premise"),
    ("p =>", "Drop", (None, None), ["p => ; q =>"], "empty"),
])
def test_invalid_steps(conclusion, rule, pos, premises, reason):
    with pytest.raises(StepError) as info:
        check_step(H(conclusion), rule, pos, [H(x) for x in premises])
    assert reason in info.value.reason


def test_structural_derivations_need_their_rules():
    rb, s4, s5 = rb_derivation(), rs4_derivation(), rs5_derivation()
    assert check_derivation(rb, "B").valid
    assert not check_derivation(rb, "K").valid
    assert check_derivation(s4, "S4").valid and check_derivation(s4, "S5").valid
    assert not check_derivation(s4, "T").valid
    assert check_derivation(s5, "S5").valid
    report = check_derivation(s5, "S4")
    assert not report.valid and report.rule is RuleId.EE
    assert "not in logic S4" in report.error


def test_report_points_at_first_bad_node():
    bad = node("ImpR", "=> p -> q", 0, 0, node("Axiom", "p => p"))
    report = check_derivation(bad, "K")
    assert not report.valid and report.path == () and report.rule is RuleId.ImpR
    assert str(report).startswith("invalid at root (ImpR)")
    deep = node("WR", "p, r => p, q", 0, 1, node("WL", "p, r => p", 0, 1, node("Axiom", "q => q")))
    report = check_derivation(deep, "K")
    assert report.path == (0,)


def test_cut_is_opt_in():
    d = node("Cut", "p => p", 0, None, node("Axiom", "p => p"), node("Axiom", "p => p"))
    assert not check_derivation(d, "K").valid
    assert check_derivation(d, "K", allow_cut=True).valid


def test_json_round_trip():
    for d in (rb_derivation(), rs4_derivation(), rs5_derivation()):
        text = dumps_derivation(d)
        assert loads_derivation(text) == d
        assert json.loads(text)["rule"] == "ImpR"


@pytest.mark.parametrize("obj", [[], {"rule": "Nope", "conclusion": "=>"}, {"conclusion": "p => p"},
                                 {"rule": "WL", "conclusion": "p => p", "position": {"component": "x"}}])
def test_json_rejects_malformed(obj):
    with pytest.raises(ValueError):
        derivation_from_json(obj)


def test_closure_for_finds_first_closed_component():
    h = H("p => q ; q, r => r ; s =>")
    d = closure_for(h)
    assert d.conclusion == h and check_derivation(d, "K").valid
    assert closure_for(H("p => q")) is None


def test_deep_derivation_is_checked_iteratively():
    d = node("Axiom", "p => p")
    for _ in range(2500):
        d = node("CL", "p => p", 0, 0, node("WL", "p, p => p", 0, 1, d))
    report = check_derivation(d, "K")
    assert report.valid and report.nodes_checked == 5001


# one-premise structural rules and the frame class they are sound for
TRANSFER_CLASSES = {"EC": "reflexive", "EW": "transitive", "Drop": "serial",
                    "Sym": "symmetric", "EWL": "any", "EWR": "any"}


def structural_instance(rule: str, rng: random.Random):
    """A (conclusion, premise) pair for ``rule`` built from random components."""
    h = random_hypersequent(rng, max_len=3, depth=2, width=2, atoms=("p",))
    empty = Sequent()
    if rule == "EC":
        i = rng.randrange(len(h))
        return h, h[:i] + (h[i], h[i]) + h[i + 1:], (i, None)
    if rule == "EW":
        i = rng.randrange(len(h) + 1)
        return h[:i] + (empty,) + h[i:], h, (i, None)
    if rule == "Drop":
        return h, h + (empty,), (None, None)
    if rule == "Sym":
        return tuple(reversed(h)), h, (None, None)
    if rule == "EWL":
        return (empty,) + h, h, (None, None)
    return h + (empty,), h, (None, None)


def models_by_class():
    return {c: list(enumerate_models(c, 3, ("p",))) for c in set(TRANSFER_CLASSES.values())}


def transfer_failures(rule, instances, models):
    bad = 0
    for conc, prem, pos in instances:
        assert check_step(conc, rule, pos, [prem])
        for m in models:
            if has_counterexample(m, conc) is not None and has_counterexample(m, prem) is None:
                bad += 1
                break
    return bad


@pytest.fixture(scope="module")
def class_models():
    return models_by_class()


@pytest.mark.parametrize("rule", sorted(TRANSFER_CLASSES))
def test_counterexample_transfer(rule, class_models):
    rng = random.Random(hash(rule) % 1000)
    instances = [structural_instance(rule, rng) for _ in range(15)]
    assert transfer_failures(rule, instances, class_models[TRANSFER_CLASSES[rule]]) == 0


def test_transfer_fails_off_class():
    # EC is unsound without reflexivity: []p -> p has a counterexample on the 1-world irreflexive frame
    conc = H("[]p => p")
    prem = H("[]p => p ; []p => p")
    irreflexive = [m for m in enumerate_models("any", 1, ("p",)) if not m.edges]
    assert any(has_counterexample(m, conc) and not has_counterexample(m, prem) for m in irreflexive)
