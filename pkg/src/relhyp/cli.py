"""Command line interface.

Exit codes: 0 success (provable / valid / counterexample found), 1 the
negative answer (refutable / invalid / no counterexample), 2 bad input or
unsupported logic, 3 a result failed its own verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .calculus import (
    Derivation, LogicId, check_derivation, dumps_derivation, loads_derivation,
)
from .hyperseq import Hypersequent, parse_hypersequent, render_hypersequent
from .prover import Provable, decide
from .reduction import UnsupportedLogic
from .semantics import (
    BoundTooLarge, InvalidModel, KripkeModel, ModelBound, default_bound,
    dumps_model, frame_check, frame_property_for, has_counterexample,
    is_counterexample, loads_model, oracle_search, to_dot,
)
from .syntax import ParseError

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_SELFCHECK = 0, 1, 2, 3

LOGICS = ["k", "t", "d", "b", "s4", "s5"]


class InputError(Exception):
    pass


def render_derivation(d: Derivation) -> str:
    """Indented text form, conclusion first, premises beneath."""
    lines = []
    stack = [(d, 0)]
    while stack:
        node, depth = stack.pop()
        pos = ""
        if node.component is not None:
            pos = f" [c{node.component}" + (f" f{node.formula}" if node.formula is not None else "") + "]"
        lines.append(f"{'  ' * depth}{node.rule.value}{pos}: {render_hypersequent(node.conclusion)}")
        stack.extend((p, depth + 1) for p in reversed(node.premises))
    return "\n".join(lines)


def render_model_text(m: KripkeModel, assignment=None) -> str:
    lines = ["worlds: " + ", ".join(m.worlds)]
    edges = ", ".join(f"{a}->{b}" for a, b in sorted(m.edges))
    lines.append(f"edges: {edges or '(none)'}")
    for p, vs in sorted(m.valuation.items()):
        lines.append(f"V({p}) = {{{', '.join(sorted(vs))}}}")
    if assignment:
        lines.append("branch: " + ", ".join(assignment))
    return "\n".join(lines)


def _read_hypersequent(args) -> Hypersequent:
    if getattr(args, "file", None):
        text = Path(args.file).read_text()
    elif args.hypersequent is not None:
        text = args.hypersequent
    else:
        raise InputError("no hypersequent given")
    return parse_hypersequent(text.strip())


def _verify_model(m: KripkeModel, h: Hypersequent, logic: LogicId):
    """Return (assignment, failed frame properties)."""
    assignment = has_counterexample(m, h)
    bad = [p.value for p in frame_property_for(logic) if not frame_check(m, p)]
    return assignment, bad


def _emit_model(args, m: KripkeModel, assignment, title: str):
    if args.format == "json":
        print(dumps_model(m))
    elif args.format == "dot":
        print(to_dot(m), end="")
    else:
        print(render_model_text(m, assignment))
    if args.output:
        Path(args.output).write_text(dumps_model(m) + "\n")
    if args.figure:
        from .plotting import render_model
        render_model(m, args.figure, title=title)


def cmd_prove(args) -> int:
    logic = LogicId.parse(args.logic)
    h = _read_hypersequent(args)
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    result = decide(h, logic, trace=trace)
    if isinstance(result, Provable):
        report = check_derivation(result.derivation, logic, allow_cut=False)
        if not report.valid:
            print(f"self-check failed: {report}", file=sys.stderr)
            return EXIT_SELFCHECK
        print("PROVABLE")
        if args.format == "text":
            print(render_derivation(result.derivation))
        else:
            print(dumps_derivation(result.derivation))
        if args.output:
            Path(args.output).write_text(dumps_derivation(result.derivation) + "\n")
        return EXIT_YES
    m = result.model
    bad = [p.value for p in frame_property_for(logic) if not frame_check(m, p)]
    if not is_counterexample(m, result.assignment, h) or bad:
        print("self-check failed: model is not a counterexample"
              + (f" (frame not {', '.join(bad)})" if bad else ""), file=sys.stderr)
        return EXIT_SELFCHECK
    print("REFUTABLE")
    _emit_model(args, m, result.assignment, f"{logic.value}: {render_hypersequent(h)}")
    return EXIT_NO


def cmd_check(args) -> int:
    logic = LogicId.parse(args.logic)
    if args.format == "dot":
        raise InputError("dot output is only available for models")
    text = Path(args.derivation).read_text()
    try:
        d = loads_derivation(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed derivation file: {e}") from None
    report = check_derivation(d, logic, allow_cut=args.allow_cut)
    if args.format == "json":
        print(json.dumps({"valid": report.valid, "path": list(report.path) if report.path is not None else None,
                          "error": report.error, "nodes": report.nodes_checked}))
    else:
        print("VALID" if report.valid else "INVALID")
        print(report)
    return EXIT_YES if report.valid else EXIT_NO


def cmd_verify(args) -> int:
    logic = LogicId.parse(args.logic)
    m = loads_model(Path(args.model).read_text())
    h = _read_hypersequent(args)
    assignment, bad = _verify_model(m, h, logic)
    if assignment is None:
        print("NO COUNTEREXAMPLE")
    else:
        print("COUNTEREXAMPLE " + " ".join(assignment))
    for p in bad:
        print(f"frame is not {p}")
    return EXIT_YES if assignment is not None and not bad else EXIT_NO


def cmd_oracle(args) -> int:
    logic = LogicId.parse(args.logic)
    if logic not in (LogicId.K, LogicId.T, LogicId.D):
        raise UnsupportedLogic(logic)
    h = _read_hypersequent(args)
    base = default_bound(h)
    bound = ModelBound(
        max_depth=args.max_depth if args.max_depth is not None else base.max_depth,
        max_branch=args.max_branch if args.max_branch is not None else base.max_branch,
        max_worlds=args.max_worlds,
        budget=args.budget,
    )
    found = oracle_search(h, logic, bound)
    if found is None:
        print(f"ABSENT (depth <= {bound.max_depth}, branching <= {bound.max_branch}"
              + (f", worlds <= {bound.max_worlds}" if bound.max_worlds is not None else "") + ")")
        return EXIT_NO
    m, assignment = found
    print("FOUND")
    _emit_model(args, m, assignment, f"{logic.value} oracle: {render_hypersequent(h)}")
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relhyp", description="Relational hypersequent calculi for modal logics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json", "dot")):
        p.add_argument("--logic", choices=LOGICS, default="k", type=str.lower)
        p.add_argument("--format", choices=formats, default="text")

    def hyp_input(p):
        p.add_argument("hypersequent", nargs="?", help='e.g. "[]~(p&q) => []~q ; p =>"')
        p.add_argument("--file", help="read the hypersequent from a file")

    def model_outputs(p):
        p.add_argument("-o", "--output", help="also write the JSON result to this file")
        p.add_argument("--figure", help="render the countermodel to an image file (png, pdf, svg)")

    p = sub.add_parser("prove", help="decide a hypersequent in K, T or D")
    common(p)
    hyp_input(p)
    model_outputs(p)
    p.add_argument("--trace", action="store_true", help="print reduction steps to stderr")
    p.add_argument("--allow-cut", action="store_true", help="accepted for symmetry; the prover is cut-free")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="check a derivation file")
    common(p)
    p.add_argument("derivation")
    p.add_argument("--allow-cut", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="check that a model file is a counterexample")
    common(p)
    p.add_argument("model")
    hyp_input(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="bounded brute-force countermodel search")
    common(p)
    hyp_input(p)
    model_outputs(p)
    p.add_argument("--max-worlds", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--max-branch", type=int)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError, InvalidModel, UnsupportedLogic, BoundTooLarge, ValueError, OSError) as e:
        name = type(e).__name__
        print(f"error: {name}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
