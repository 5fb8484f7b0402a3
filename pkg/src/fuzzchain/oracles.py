"""Slow, obviously-correct reference implementations for differential checks.

Everything here is written straight from the definitions, with its own
path walking and its own interpreter loop — deliberately sharing nothing
with the production engines beyond the scalar max/min and the parsed
data model.  Instance sizes are capped (one knob record below) because
these run in exponential time and exist only to cross-examine the fast
code on small cases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Call, FtfExpr, Var, snorm_max, tnorm_min
from .errors import BindingError
from .systems import SystemRegistry

__all__ = ["OracleLimits", "LIMITS", "oracle_path_enum", "oracle_unroll_eval", "oracle_power_eval"]


@dataclass(frozen=True)
class OracleLimits:
    """Size caps for oracle inputs; exceeding one is a usage bug."""

    max_vertices: int = 8
    max_power_k: int = 3
    max_expr_terms: int = 4


LIMITS = OracleLimits()


def oracle_path_enum(
    vertices: list[str] | tuple[str, ...],
    edge_value: dict[tuple[str, str], float],
    start: str,
    goal: str,
    allowed_intermediates: set[str] | None = None,
) -> float:
    """Max over simple start->goal paths of the min edge value, by brute force.

    ``edge_value`` maps ordered vertex pairs to grades; missing pairs
    count as 0.  ``allowed_intermediates`` optionally restricts which
    vertices may appear strictly inside a path.  ``start == goal`` is
    the empty path with value 1.
    """
    if len(vertices) > LIMITS.max_vertices:
        raise ValueError(f"oracle_path_enum capped at {LIMITS.max_vertices} vertices")
    if start == goal:
        return 1.0

    best = 0.0
    visited = {start}

    def step(u: str, v: str) -> float:
        return edge_value.get((u, v), 0.0)

    def walk(here: str, value: float) -> None:
        nonlocal best
        direct = tnorm_min(value, step(here, goal))
        best = snorm_max(best, direct)
        for nxt in vertices:
            if nxt in visited or nxt == goal:
                continue
            if allowed_intermediates is not None and nxt not in allowed_intermediates:
                continue
            via = tnorm_min(value, step(here, nxt))
            if via <= best:
                continue  # min never recovers; this branch cannot win
            visited.add(nxt)
            walk(nxt, via)
            visited.remove(nxt)

    walk(start, 1.0)
    return best


def oracle_unroll_eval(
    registry: SystemRegistry,
    name: str,
    assignment: dict[str, float],
    budget: int | None = None,
) -> float:
    """Definitional interpreter for a system's transmission grade.

    ``budget`` is the remaining call allowance while walking the named
    system's body: an edge calling tau with declared count m runs the
    callee with allowance min(m, budget - 1) and a chain dies when that
    allowance is not positive.  ``budget=None`` is the top level, where
    every call runs at its full declared count.  No memoization, no
    stack machinery — just the recursion.
    """
    system = registry[name]
    if len(system.vertices) > LIMITS.max_vertices:
        raise ValueError(f"oracle_unroll_eval capped at {LIMITS.max_vertices} vertices")
    goal = system.output_terminal
    best = 0.0

    def chain_value(here: str, visited: set[str], value: float) -> None:
        nonlocal best
        if here == goal:
            best = snorm_max(best, value)
            return
        for nxt, atom in system.neighbors(here):
            if nxt in visited:
                continue
            if isinstance(atom, Var):
                try:
                    grade = assignment[atom.name]
                except KeyError:
                    raise BindingError(f"missing binding for variable {atom.name!r}") from None
            else:
                assert isinstance(atom, Call)
                allowance = atom.count if budget is None else min(atom.count, budget - 1)
                if allowance < 1:
                    continue  # exhausted call: the chain cannot be completed
                grade = oracle_unroll_eval(registry, atom.target, assignment, allowance)
            chain_value(nxt, visited | {nxt}, tnorm_min(value, grade))

    start = system.input_terminal
    chain_value(start, {start}, 1.0)
    return best


def oracle_power_eval(expr: FtfExpr, k: int, assignment: dict[str, float]) -> float:
    """Value of the k-th power of a call-free expression, composition by
    composition.

    Enumerates every way to pick k terms (with repetition) out of the
    expression, takes the min of the chosen term values, and keeps the
    max.  Agrees with evaluating the expression once, since min and max
    are idempotent.
    """
    if not (1 <= k <= LIMITS.max_power_k):
        raise ValueError(f"oracle_power_eval capped at k in 1..{LIMITS.max_power_k}")
    if len(expr.terms) > LIMITS.max_expr_terms:
        raise ValueError(f"oracle_power_eval capped at {LIMITS.max_expr_terms} terms")

    term_values = []
    for term in expr.terms:
        value = 1.0
        for atom in term.atoms:
            if not isinstance(atom, Var):
                raise ValueError("oracle_power_eval needs a call-free expression")
            try:
                value = tnorm_min(value, assignment[atom.name])
            except KeyError:
                raise BindingError(f"missing binding for variable {atom.name!r}") from None
        term_values.append(value)

    m = len(term_values)
    best = 0.0

    def pick(slot: int, lowest: float) -> None:
        nonlocal best
        if slot == k:
            best = snorm_max(best, lowest)
            return
        for i in range(m):
            pick(slot + 1, tnorm_min(lowest, term_values[i]))

    pick(0, 1.0)
    return best
