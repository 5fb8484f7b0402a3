"""Max-min matrix algebra: products, powers, and transitive closure.

Matrices here are plain ``list[list[float]]`` of membership grades.
The product substitutes max for addition and min for multiplication;
the closure is the classic ascending-pivot relaxation.  After pivot k
(0-based), entry (i, j) is the best max-min value over simple paths
from i to j whose intermediate vertices are all drawn from the first
k + 1 vertices — running every pivot therefore yields the best value
over all simple paths.  Because max and min only select their inputs,
every entry of every result is an entry of the input matrix (or 0/1),
and exact equality holds throughout.
"""

from __future__ import annotations

from typing import Iterator

from .algebra import Call, assignment_valuation, snorm_max, tnorm_min
from .systems import (
    ONE,
    ZERO,
    ConnectionMatrix,
    FuzzySystem,
    SystemRegistry,
    cell_text,
    connection_matrix,
)

__all__ = [
    "maxmin_matmul",
    "matrix_power",
    "warshall_steps",
    "warshall_closure",
    "resolve_matrix",
    "transmission",
    "render_numeric_matrix",
    "render_symbolic_matrix",
]

Matrix = list[list[float]]


def _check_square(m: Matrix, what: str = "matrix") -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError(f"{what} is not square")
    return n


def maxmin_matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product in the max-min algebra."""
    n = _check_square(a)
    if _check_square(b) != n:
        raise ValueError(f"dimension mismatch: {n} vs {len(b)}")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc = snorm_max(acc, tnorm_min(a[i][k], b[k][j]))
            row.append(acc)
        out.append(row)
    return out


def matrix_power(m: Matrix, p: int) -> Matrix:
    """p-fold max-min product of ``m`` with itself (p >= 1)."""
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"matrix power needs an integer p >= 1, got {p!r}")
    _check_square(m)
    out = [row[:] for row in m]
    for _ in range(p - 1):
        out = maxmin_matmul(out, m)
    return out


def warshall_steps(m: Matrix) -> Iterator[tuple[int, Matrix]]:
    """Run the closure relaxation, yielding (pivot, snapshot) after each pivot.

    Snapshots are copies, so callers may keep or mutate them freely.
    """
    n = _check_square(m)
    work = [row[:] for row in m]
    for k in range(n):
        for i in range(n):
            through = work[i][k]
            row_k = work[k]
            row_i = work[i]
            for j in range(n):
                row_i[j] = snorm_max(row_i[j], tnorm_min(through, row_k[j]))
        yield k, [row[:] for row in work]


def warshall_closure(m: Matrix) -> Matrix:
    """Max-min transitive closure of ``m``.

    One relaxation sweep reaches the fixpoint; a second sweep asserts
    idempotence on every call (cheap at the matrix sizes this package
    works with, and it turns any future ordering bug into a loud
    failure rather than a silently weaker closure).
    """
    out = [row[:] for row in m]
    for _, snapshot in warshall_steps(m):
        out = snapshot
    for _, snapshot in warshall_steps(out):
        if snapshot != out:
            raise AssertionError("closure failed to reach a fixpoint in one sweep")
    return out


def resolve_matrix(
    registry: SystemRegistry, name: str, assignment: dict[str, float]
) -> tuple[tuple[str, ...], Matrix]:
    """Numeric connection matrix of a system under an assignment.

    Variable cells take their bound grade; call cells take the called
    system's value at the declared budget (0 when the declared count is
    0 — a call that may never run transmits nothing).  Returns the
    vertex order alongside the grid.
    """
    from .recursion import resolve_call

    system = registry[name]
    symbolic = connection_matrix(system)
    valuation = assignment_valuation(assignment)
    grid: Matrix = []
    call_cache: dict[tuple[str, int], float] = {}
    for row in symbolic.cells:
        out_row = []
        for cell in row:
            if cell is ONE:
                out_row.append(1.0)
            elif cell is ZERO:
                out_row.append(0.0)
            elif isinstance(cell, Call):
                key = (cell.target, cell.count)
                if key not in call_cache:
                    call_cache[key] = (
                        0.0 if cell.count < 1 else resolve_call(registry, *key, assignment)
                    )
                out_row.append(call_cache[key])
            else:
                out_row.append(valuation(cell))
        grid.append(out_row)
    return symbolic.vertices, grid


def transmission(registry: SystemRegistry, name: str, assignment: dict[str, float]) -> float:
    """Input-to-output grade: closure of the resolved connection matrix."""
    system = registry[name]
    vertices, grid = resolve_matrix(registry, name, assignment)
    closed = warshall_closure(grid)
    return closed[vertices.index(system.input_terminal)][vertices.index(system.output_terminal)]


# --- rendering --------------------------------------------------------------


def _render_grid(header: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def render_numeric_matrix(vertices: tuple[str, ...], grid: Matrix) -> str:
    header = [""] + list(vertices)
    rows = [[v] + [repr(x) for x in grid[i]] for i, v in enumerate(vertices)]
    return _render_grid(header, rows)


def render_symbolic_matrix(matrix: ConnectionMatrix) -> str:
    header = [""] + list(matrix.vertices)
    rows = [
        [v] + [cell_text(c) for c in matrix.cells[i]] for i, v in enumerate(matrix.vertices)
    ]
    return _render_grid(header, rows)
