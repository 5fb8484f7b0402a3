"""Command line interface.

Exit codes are part of the contract:

* 0 — success
* 1 — usage error (bad flags, malformed ``--set``)
* 2 — parse error in a registry or assignment file
* 3 — validation error (unknown system, missing binding, bad grade)
* 4 — internal invariant breach (a check suite or engine/oracle disagreement)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .algebra import (
    canonicalize,
    expr_power,
    format_expr,
    format_term,
    is_identifier,
    multinomial_expand,
    parse_expr,
)
from .chains import derive_ftf
from .checks import run_all
from .closure import (
    render_numeric_matrix,
    render_symbolic_matrix,
    resolve_matrix,
    transmission,
    warshall_closure,
)
from .errors import BindingError, ParseError, UnknownSystemError
from .recursion import (
    eval_system,
    expansion_tree,
    render_expansion,
    resolve_call,
    symbolic_expand,
    trace_eval,
)
from .systems import (
    FIXTURE_ASSIGNMENT,
    builtin_fixtures,
    connection_matrix,
    format_assignment,
    format_registry,
    parse_assignment,
    parse_registry,
    validate_registry,
)

USAGE_ERROR = 1
PARSE_ERROR = 2
VALIDATION_ERROR = 3
CHECK_FAILED = 4


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage problems; we reserve 2 for file
    parse errors, so usage problems exit 1 instead."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("FUZZCHAIN_SEED", "42")
    try:
        return int(raw)
    except ValueError:
        return 42


def _set_pair(text: str) -> tuple[str, float]:
    name, sep, raw = text.partition("=")
    if not sep or not is_identifier(name):
        raise argparse.ArgumentTypeError(f"expected var=value, got {text!r}")
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grade in {text!r}") from None
    return name, value


_BUILTIN = object()  # `--fixtures` with no path means the built-in registry


def _add_common(sub: argparse.ArgumentParser, system_default: str | None = "psi1") -> None:
    sub.add_argument("--fixtures", nargs="?", const=_BUILTIN, default=_BUILTIN,
                     metavar="FILE", help="registry file (bare flag or omitted: built-ins)")
    sub.add_argument("--rec-count", type=int, default=2, metavar="N",
                     help="self-call count for the built-in recursive fixture")
    if system_default is not None:
        sub.add_argument("--system", default=system_default, help="system name")
    sub.add_argument("--json", action="store_true", help="machine-readable output")


def _add_assignment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--assign", metavar="FILE", help="assignment file")
    sub.add_argument("--set", type=_set_pair, action="append", default=[],
                     metavar="VAR=VALUE", help="bind one variable (repeatable)")


def _load_registry(args: argparse.Namespace):
    if args.fixtures is not _BUILTIN:
        registry = parse_registry(Path(args.fixtures).read_text(encoding="utf-8"))
        base: dict[str, float] = {}
    else:
        registry = builtin_fixtures(rec_count=args.rec_count)
        base = dict(FIXTURE_ASSIGNMENT)
    return registry, base


def _assignment(args: argparse.Namespace, base: dict[str, float]) -> dict[str, float]:
    out = dict(base)
    if getattr(args, "assign", None):
        out = parse_assignment(Path(args.assign).read_text(encoding="utf-8"))
    for name, value in getattr(args, "set", []):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"grade for {name!r} out of range: {value!r}")
        out[name] = value
    return out


def _emit(payload: dict, as_json: bool, plain: str) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(plain)


# --------------------------------------------------------------------------
# Subcommand handlers


def _cmd_ftf(args) -> int:
    registry, _ = _load_registry(args)
    expr = derive_ftf(registry[args.system])
    if args.simplify:
        expr = canonicalize(expr, simplify=True)
    text = format_expr(expr, args.mode)
    _emit({"system": args.system, "mode": args.mode, "expr": text}, args.json, text)
    return 0


def _cmd_matrix(args) -> int:
    registry, base = _load_registry(args)
    if args.resolve:
        vertices, grid = resolve_matrix(registry, args.system, _assignment(args, base))
        payload = {"system": args.system, "vertices": list(vertices), "cells": grid}
        _emit(payload, args.json, render_numeric_matrix(vertices, grid))
    else:
        matrix = connection_matrix(registry[args.system])
        payload = {
            "system": args.system,
            "vertices": list(matrix.vertices),
            "cells": [[str(cell) for cell in row] for row in matrix.cells],
        }
        _emit(payload, args.json, render_symbolic_matrix(matrix))
    return 0


def _cmd_eval(args) -> int:
    registry, base = _load_registry(args)
    assignment = _assignment(args, base)
    if args.budget is None:
        value = eval_system(registry, args.system, assignment)
    else:
        value = resolve_call(registry, args.system, args.budget, assignment)
    payload = {"system": args.system, "budget": args.budget, "value": value}
    _emit(payload, args.json, repr(value))
    return 0


def _cmd_closure(args) -> int:
    registry, base = _load_registry(args)
    assignment = _assignment(args, base)
    vertices, grid = resolve_matrix(registry, args.system, assignment)
    closed = warshall_closure(grid)
    value = transmission(registry, args.system, assignment)
    payload = {
        "system": args.system,
        "vertices": list(vertices),
        "closure": closed,
        "transmission": value,
    }
    system = registry[args.system]
    plain = render_numeric_matrix(vertices, closed) + (
        f"\ntransmission {system.input_terminal}->{system.output_terminal} = {value!r}"
    )
    _emit(payload, args.json, plain)
    return 0


def _cmd_trace(args) -> int:
    registry, base = _load_registry(args)
    result = trace_eval(registry, args.system, _assignment(args, base))
    payload = {"system": args.system, "value": result.value, "events": result.lines()}
    _emit(payload, args.json, "\n".join(result.lines()))
    return 0


def _cmd_expand(args) -> int:
    registry, _ = _load_registry(args)
    if args.mode == "raw":
        text = render_expansion(expansion_tree(registry, args.system, args.budget))
        if args.simplify:
            expr = canonicalize(symbolic_expand(registry, args.system, args.budget), simplify=True)
            text = format_expr(expr, "canonical")
    else:
        expr = symbolic_expand(registry, args.system, args.budget)
        if args.simplify:
            expr = canonicalize(expr, simplify=True)
        text = format_expr(expr, args.mode)
    _emit({"system": args.system, "mode": args.mode, "expr": text}, args.json, text)
    return 0


def _cmd_power(args) -> int:
    expr = parse_expr(args.expr)
    powered_expr = expr_power(expr, args.k)
    if args.simplify:
        powered_expr = canonicalize(powered_expr, simplify=True)
    powered = format_expr(powered_expr, args.mode)
    lines = [powered]
    rows = []
    for entry in multinomial_expand(expr, args.k):
        composition = ",".join(str(c) for c in entry.composition)
        term = format_term(entry.term, "canonical")
        rows.append({"composition": composition, "coefficient": entry.coefficient,
                     "term": term})
        lines.append(f"{entry.coefficient} * ({composition}) -> {term}")
    payload = {"expr": format_expr(expr, "raw"), "k": args.k, "power": powered,
               "table": rows}
    _emit(payload, args.json, "\n".join(lines))
    return 0


def _cmd_check(args) -> int:
    results = run_all(args.seed, args.trials)
    ok = all(r.passed for r in results)
    payload = {
        "seed": args.seed,
        "trials": args.trials,
        "passed": ok,
        "results": [
            {"name": r.name, "trials": r.trials, "failures": r.failures, "detail": r.detail}
            for r in results
        ],
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for r in results:
            print(r.summary())
    return 0 if ok else CHECK_FAILED


def _cmd_fixtures(args) -> int:
    if args.values:
        text = format_assignment(FIXTURE_ASSIGNMENT)
        _emit({"assignment": FIXTURE_ASSIGNMENT}, args.json, text)
        return 0
    registry = builtin_fixtures(rec_count=args.rec_count)
    text = format_registry(registry)
    _emit({"registry": text}, args.json, text)
    return 0


def _cmd_validate(args) -> int:
    registry, _ = _load_registry(args)
    diagnostics = validate_registry(registry)
    payload = {
        "systems": list(registry.names()),
        "diagnostics": [
            {"system": d.system, "severity": d.severity, "message": d.message}
            for d in diagnostics
        ],
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif diagnostics:
        for d in diagnostics:
            print(f"{d.severity}: {d.system}: {d.message}")
    else:
        print(f"ok: {len(registry)} systems")
    if any(d.severity == "error" for d in diagnostics):
        return VALIDATION_ERROR
    return 0


# --------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="fuzzchain", description="Max-min fuzzy system chains.")
    subs = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub = subs.add_parser("ftf", help="fuzzy transfer function of a system")
    _add_common(sub)
    sub.add_argument("--mode", choices=("raw", "canonical", "paper"), default="raw")
    sub.add_argument("--simplify", action="store_true", help="drop absorbed terms")
    sub.set_defaults(handler=_cmd_ftf)

    sub = subs.add_parser("matrix", help="connection matrix of a system")
    _add_common(sub)
    _add_assignment_flags(sub)
    sub.add_argument("--resolve", action="store_true", help="numeric cells via assignment")
    sub.set_defaults(handler=_cmd_matrix)

    sub = subs.add_parser("eval", help="transmission grade of a system")
    _add_common(sub)
    _add_assignment_flags(sub)
    sub.add_argument("--budget", type=int, default=None, metavar="K",
                     help="remaining call budget (default: top level)")
    sub.set_defaults(handler=_cmd_eval)

    sub = subs.add_parser("closure", help="max-min transitive closure of the resolved matrix")
    _add_common(sub)
    _add_assignment_flags(sub)
    sub.set_defaults(handler=_cmd_closure)

    sub = subs.add_parser("trace", help="narrated evaluation")
    _add_common(sub, system_default="psi1_rec")
    _add_assignment_flags(sub)
    sub.set_defaults(handler=_cmd_trace)

    sub = subs.add_parser("expand", help="unroll calls into a call-free expression")
    _add_common(sub, system_default="psi1_rec")
    sub.add_argument("--mode", choices=("raw", "canonical", "paper"), default="raw")
    sub.add_argument("--simplify", action="store_true")
    sub.add_argument("--budget", type=int, default=None, metavar="K")
    sub.set_defaults(handler=_cmd_expand)

    sub = subs.add_parser("power", help="max-min power of an expression")
    sub.add_argument("expr", help="expression text, e.g. 'xz + yw'")
    sub.add_argument("k", type=int, help="exponent (>= 1)")
    sub.add_argument("--mode", choices=("raw", "canonical", "paper"), default="canonical")
    sub.add_argument("--simplify", action="store_true")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(handler=_cmd_power)

    sub = subs.add_parser("check", help="run the differential check suites")
    sub.add_argument("--seed", type=int, default=_default_seed())
    sub.add_argument("--trials", type=int, default=500)
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(handler=_cmd_check)

    sub = subs.add_parser("fixtures", help="print the built-in registry")
    sub.add_argument("--rec-count", type=int, default=2, metavar="N")
    sub.add_argument("--values", action="store_true", help="print the fixture assignment")
    sub.add_argument("--json", action="store_true")
    sub.set_defaults(handler=_cmd_fixtures)

    sub = subs.add_parser("validate", help="structural diagnostics for a registry")
    _add_common(sub, system_default=None)
    sub.set_defaults(handler=_cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    except (BindingError, UnknownSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_ERROR
    except AssertionError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return CHECK_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
