"""Relational hypersequent calculi for the modal logics K, T, D, B, S4 and S5.

Cut-free proof search with countermodel extraction for K, T and D, a
derivation checker for all six calculi, and a bounded Kripke-model oracle.
"""

from .calculus import (
    CheckReport, Derivation, LogicId, RuleId, check_derivation, check_step,
    dumps_derivation, loads_derivation, rules_of,
)
from .hyperseq import (
    Label, LabelledHypersequent, Sequent, parse_hypersequent, render_hypersequent,
)
from .prover import Provable, Refutable, SearchTree, decide, reconstruct_derivation
from .reduction import UnsupportedLogic, full_reductions, sigma_reducts
from .semantics import (
    KripkeModel, ModelBound, evaluate, frame_check, has_counterexample,
    is_counterexample, oracle_search,
)
from .syntax import (
    And, Atom, Box, Diamond, Implies, Not, Or, ParseError, parse_formula, render_formula,
)

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Box", "Diamond", "Implies", "Not", "Or", "ParseError",
    "parse_formula", "render_formula",
    "Label", "Sequent", "LabelledHypersequent", "parse_hypersequent", "render_hypersequent",
    "LogicId", "RuleId", "Derivation", "CheckReport", "check_step", "check_derivation",
    "rules_of", "dumps_derivation", "loads_derivation",
    "UnsupportedLogic", "sigma_reducts", "full_reductions",
    "KripkeModel", "ModelBound", "evaluate", "frame_check", "is_counterexample",
    "has_counterexample", "oracle_search",
    "Provable", "Refutable", "SearchTree", "decide", "reconstruct_derivation",
]
