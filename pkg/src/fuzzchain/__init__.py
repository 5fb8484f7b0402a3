"""Max-min fuzzy systems: chains, transfer functions, closures, and
budgeted calls between systems."""

from .algebra import (
    Call,
    FtfExpr,
    Term,
    Var,
    canonicalize,
    eval_expr,
    expr_concat,
    expr_power,
    expr_union,
    format_expr,
    format_term,
    multinomial_coefficient,
    multinomial_expand,
    parse_expr,
)
from .chains import (
    ChainSpace,
    best_chain_value,
    chain_value,
    derive_ftf,
    enumerate_chains,
    lift_chain_space,
)
from .closure import (
    matrix_power,
    maxmin_matmul,
    resolve_matrix,
    transmission,
    warshall_closure,
    warshall_steps,
)
from .errors import BindingError, FuzzchainError, ParseError, UnknownSystemError
from .recursion import (
    eval_system,
    render_expansion,
    render_trace,
    resolve_call,
    stabilization_budget,
    symbolic_expand,
    trace_eval,
)
from .rng import SplitMix64
from .systems import (
    FIXTURE_ASSIGNMENT,
    ConnectionMatrix,
    FuzzySystem,
    SystemRegistry,
    builtin_fixtures,
    connection_matrix,
    format_assignment,
    format_registry,
    parse_assignment,
    parse_registry,
    validate_registry,
)

__version__ = "0.1.0"

__all__ = [
    "BindingError",
    "Call",
    "ChainSpace",
    "ConnectionMatrix",
    "FIXTURE_ASSIGNMENT",
    "FtfExpr",
    "FuzzchainError",
    "FuzzySystem",
    "ParseError",
    "SplitMix64",
    "SystemRegistry",
    "Term",
    "UnknownSystemError",
    "Var",
    "best_chain_value",
    "builtin_fixtures",
    "canonicalize",
    "chain_value",
    "connection_matrix",
    "derive_ftf",
    "enumerate_chains",
    "eval_expr",
    "eval_system",
    "expr_concat",
    "expr_power",
    "expr_union",
    "format_assignment",
    "format_expr",
    "format_registry",
    "format_term",
    "lift_chain_space",
    "matrix_power",
    "maxmin_matmul",
    "multinomial_coefficient",
    "multinomial_expand",
    "parse_assignment",
    "parse_expr",
    "parse_registry",
    "render_expansion",
    "render_trace",
    "resolve_call",
    "resolve_matrix",
    "stabilization_budget",
    "symbolic_expand",
    "trace_eval",
    "transmission",
    "validate_registry",
    "warshall_closure",
    "warshall_steps",
    "__version__",
]
