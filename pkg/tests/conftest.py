"""Shared fixtures and helpers for the test suite.

Everything here is exact-equality friendly: max-min evaluation never
invents float values, so no test in this suite uses a tolerance.
"""

from __future__ import annotations

import contextlib
import io
from pathlib import Path

import pytest

from fuzzchain.cli import main as cli_main
from fuzzchain.systems import (
    FIXTURE_ASSIGNMENT,
    builtin_fixtures,
    format_registry,
    parse_registry,
)

GOLDEN_DIR = Path(__file__).parent / "golden"

# One golden file per CLI subcommand (a few get a second variant where the
# flag changes the output shape).  Determinism tests replay every entry and
# insist on byte-identical stdout.
GOLDEN_COMMANDS: dict[str, tuple[str, ...]] = {
    "ftf_psi1_paper.txt": ("ftf", "--system", "psi1", "--mode", "paper"),
    "ftf_phi_raw.txt": ("ftf", "--system", "phi"),
    "matrix_psi1.txt": ("matrix", "--system", "psi1"),
    "matrix_psi1_resolved.txt": ("matrix", "--system", "psi1", "--resolve"),
    "eval_phi.txt": ("eval", "--system", "phi"),
    "eval_phi_json.txt": ("eval", "--system", "phi", "--json"),
    "eval_psi1_rec_budget0.txt": ("eval", "--system", "psi1_rec", "--budget", "0"),
    "closure_psi1.txt": ("closure", "--system", "psi1"),
    "trace_psi1_rec.txt": ("trace",),
    "expand_psi1_rec.txt": ("expand",),
    "expand_rec0.txt": ("expand", "--rec-count", "0"),
    "power_x1_x2_sq.txt": ("power", "x1 + x2", "2"),
    "check_seed42.txt": ("check", "--seed", "42", "--trials", "40"),
    "fixtures.txt": ("fixtures",),
    "fixtures_values.txt": ("fixtures", "--values"),
    "validate.txt": ("validate",),
}

# psi1 with the C-D edge swapped for a budget-1 call to psi1 itself.  Under
# DEEP_ASSIGNMENT the call-free chains are weak (0.2) and the call chain is
# strong (0.8), so the budget staircase of psi1v is actually visible:
# 0.2 at budgets 0 and 1, 0.8 from budget 2 on.
VARIANT_TEXT = """
system psi1v {
  terminals A -> B
  edge B C w
  edge A D x
  edge B D z
  edge A C y
  edge C D call psi1 1
}
"""

# Strong x/w, weak y/z: nested call chains dominate or die visibly.
DEEP_ASSIGNMENT = {"x": 0.9, "y": 0.2, "w": 0.8, "z": 0.1}


def invoke_cli(*argv: str) -> tuple[int, str, str]:
    """Run the CLI in-process, returning (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli_main(list(argv))
    except SystemExit as exc:  # argparse usage failures exit directly
        code = exc.code
    return code, out.getvalue(), err.getvalue()


def read_golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")


@pytest.fixture
def registry():
    return builtin_fixtures()


@pytest.fixture
def fixture_assignment():
    return dict(FIXTURE_ASSIGNMENT)


@pytest.fixture
def deep_assignment():
    return dict(DEEP_ASSIGNMENT)


@pytest.fixture
def variant_registry():
    """Built-ins plus psi1v (see VARIANT_TEXT), rebuilt through the parser."""
    return parse_registry(format_registry(builtin_fixtures()) + VARIANT_TEXT)


@pytest.fixture
def run_cli():
    return invoke_cli
