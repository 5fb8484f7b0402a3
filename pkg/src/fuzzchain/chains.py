"""Chain enumeration, derived transmission functions, and chain spaces.

A chain is a simple input-to-output path through a system.  Enumeration
is a depth-first walk that explores neighbors in edge-declaration order,
which makes the derived transmission function list its terms in the
same order the system's author wrote the edges — handy for stable
output and for matching hand-written sum-of-products forms.

Only simple paths matter: repeating a vertex can only extend the min
over a walk's edges, never raise it, so every walk is dominated by the
simple path it shortcuts to.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FtfExpr, Term
from .errors import FuzzchainError
from .systems import FuzzySystem

__all__ = [
    "Chain",
    "enumerate_chains",
    "chain_atoms",
    "derive_ftf",
    "ChainSpace",
    "chain_value",
    "lift_chain_space",
    "best_chain_value",
]

Chain = tuple[str, ...]


def enumerate_chains(system: FuzzySystem) -> list[Chain]:
    """All simple input->output paths, in deterministic traversal order."""
    chains: list[Chain] = []
    goal = system.output_terminal
    path = [system.input_terminal]
    on_path = {system.input_terminal}

    def walk(vertex: str) -> None:
        for neighbor, _atom in system.neighbors(vertex):
            if neighbor == goal:
                chains.append(tuple(path) + (goal,))
            elif neighbor not in on_path:
                path.append(neighbor)
                on_path.add(neighbor)
                walk(neighbor)
                on_path.remove(neighbor)
                path.pop()

    walk(system.input_terminal)
    return chains


def chain_atoms(system: FuzzySystem, chain: Chain) -> tuple:
    """The edge atoms along ``chain``, in path order."""
    atoms = []
    for u, v in zip(chain, chain[1:]):
        atom = system.edge_atom(u, v)
        if atom is None:
            raise FuzzchainError(f"no edge {u!r}-{v!r} in system {system.name!r}")
        atoms.append(atom)
    return tuple(atoms)


def derive_ftf(system: FuzzySystem) -> FtfExpr:
    """The transmission function: one raw term per chain, in chain order.

    The result is kept raw (chain order, path-ordered atoms) so that
    displays can reproduce the authored form; canonicalize it for
    comparisons.
    """
    return FtfExpr(tuple(Term(chain_atoms(system, c)) for c in enumerate_chains(system)))


# --- degree-n chain spaces --------------------------------------------------


@dataclass(frozen=True)
class ChainSpace:
    """Items of some degree plus a square transition-grade matrix over them.

    The items are opaque labels; ``mu[i][j]`` is the grade of stepping
    from item i to item j.  Nothing requires symmetry or a unit
    diagonal — the space is just a weighted step relation.
    """

    degree: int
    items: tuple[str, ...]
    mu: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        n = len(self.items)
        if len(self.mu) != n or any(len(row) != n for row in self.mu):
            raise ValueError("mu must be square over the items")
        for row in self.mu:
            for value in row:
                if not (0.0 <= value <= 1.0):
                    raise ValueError(f"mu value out of range [0, 1]: {value!r}")


def chain_value(space: ChainSpace, indices: list[int] | tuple[int, ...]) -> float:
    """Min of the consecutive transition grades along an item sequence."""
    if len(indices) < 2:
        raise ValueError("a chain needs at least two items")
    n = len(space.items)
    for i in indices:
        if not (0 <= i < n):
            raise ValueError(f"item index out of range: {i}")
    value = 1.0
    for i, j in zip(indices, indices[1:]):
        step = space.mu[i][j]
        value = step if step < value else value
    return value


def lift_chain_space(
    items: list[str] | tuple[str, ...],
    mu: list[list[float]] | tuple[tuple[float, ...], ...],
    degree: int,
) -> ChainSpace:
    """Build the next-degree space whose items are lower-degree chains.

    The supplied ``items`` name the degree-(n-1) chains and ``mu`` gives
    the grades of stepping between them; this constructor only pins the
    bookkeeping (degree, squareness, ranges) — no canonical derivation
    of ``mu`` from the lower degree is imposed.
    """
    if degree < 2:
        raise ValueError("lifted spaces start at degree 2")
    return ChainSpace(degree, tuple(items), tuple(tuple(row) for row in mu))


def best_chain_value(space: ChainSpace, start: int, end: int) -> float:
    """Best (max) chain value from item ``start`` to item ``end``.

    The empty chain from an item to itself has value 1.  Computed with
    the max-min closure of ``mu``, which agrees with brute-force
    enumeration of simple item sequences.
    """
    n = len(space.items)
    for i in (start, end):
        if not (0 <= i < n):
            raise ValueError(f"item index out of range: {i}")
    if start == end:
        return 1.0
    from .closure import warshall_closure

    return warshall_closure([list(row) for row in space.mu])[start][end]
