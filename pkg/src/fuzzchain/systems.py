"""Fuzzy systems, registries, definition files, and connection matrices.

A fuzzy system is an undirected graph with two distinguished terminals.
Each edge carries one atom: a variable (its transmission grade comes
from an assignment) or a counted call to another system in the same
registry.  Vertex order is first-seen order in the definition (the
terminals first), and edges remember their declaration order; matrices,
printed chains, and chain enumeration all derive their determinism from
those two orders.

Definition file format::

    # comment
    system psi1 {
      terminals A -> B
      edge B C w
      edge C D call psi1 2
    }

Clauses are separated by newlines or ';'.  An edge label is either an
identifier (a variable) or ``call <system> <count>``.  Call targets are
resolved lazily: parsing succeeds with dangling targets and
``validate_registry`` reports them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .algebra import Atom, Call, Var, check_grade, is_identifier
from .errors import ParseError, UnknownSystemError

__all__ = [
    "EdgeDef",
    "FuzzySystem",
    "SystemRegistry",
    "Diagnostic",
    "ConnectionMatrix",
    "ONE",
    "ZERO",
    "cell_text",
    "connection_matrix",
    "parse_registry",
    "format_registry",
    "validate_registry",
    "parse_assignment",
    "format_assignment",
    "builtin_fixtures",
    "FIXTURE_ASSIGNMENT",
]


@dataclass(frozen=True)
class EdgeDef:
    """One declared edge: endpoints in declaration orientation plus its atom."""

    u: str
    v: str
    atom: Atom

    def pair(self) -> frozenset[str]:
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class FuzzySystem:
    """An undirected labeled graph with input and output terminals."""

    name: str
    input_terminal: str
    output_terminal: str
    vertices: tuple[str, ...]
    edges: tuple[EdgeDef, ...]

    def __post_init__(self) -> None:
        for ident in (self.name, self.input_terminal, self.output_terminal, *self.vertices):
            if not is_identifier(ident):
                raise ValueError(f"invalid identifier: {ident!r}")
        if self.input_terminal == self.output_terminal:
            raise ValueError(f"system {self.name!r}: terminals must differ")
        seen_vertices = set(self.vertices)
        if len(seen_vertices) != len(self.vertices):
            raise ValueError(f"system {self.name!r}: duplicate vertex in order")
        for terminal in (self.input_terminal, self.output_terminal):
            if terminal not in seen_vertices:
                raise ValueError(f"system {self.name!r}: terminal {terminal!r} not among vertices")
        pairs = set()
        for edge in self.edges:
            if edge.u == edge.v:
                raise ValueError(f"system {self.name!r}: self-loop at {edge.u!r}")
            if edge.u not in seen_vertices or edge.v not in seen_vertices:
                raise ValueError(f"system {self.name!r}: edge endpoint not among vertices")
            if edge.pair() in pairs:
                raise ValueError(f"system {self.name!r}: duplicate edge {edge.u!r}-{edge.v!r}")
            pairs.add(edge.pair())

    @staticmethod
    def build(
        name: str,
        input_terminal: str,
        output_terminal: str,
        edges: list[tuple[str, str, Atom]] | tuple[tuple[str, str, Atom], ...],
    ) -> "FuzzySystem":
        """Construct with first-seen vertex order (terminals first)."""
        order: list[str] = []
        for vertex in (input_terminal, output_terminal):
            if vertex not in order:
                order.append(vertex)
        for u, v, _ in edges:
            for vertex in (u, v):
                if vertex not in order:
                    order.append(vertex)
        return FuzzySystem(
            name,
            input_terminal,
            output_terminal,
            tuple(order),
            tuple(EdgeDef(u, v, atom) for u, v, atom in edges),
        )

    @cached_property
    def _adjacency(self) -> dict[str, tuple[tuple[str, Atom], ...]]:
        adjacency: dict[str, list[tuple[str, Atom]]] = {v: [] for v in self.vertices}
        for edge in self.edges:
            adjacency[edge.u].append((edge.v, edge.atom))
            adjacency[edge.v].append((edge.u, edge.atom))
        return {v: tuple(pairs) for v, pairs in adjacency.items()}

    def neighbors(self, vertex: str) -> tuple[tuple[str, Atom], ...]:
        """(neighbor, atom) pairs in edge-declaration order."""
        return self._adjacency[vertex]

    @cached_property
    def _edge_lookup(self) -> dict[frozenset[str], Atom]:
        return {edge.pair(): edge.atom for edge in self.edges}

    def edge_atom(self, u: str, v: str) -> Atom | None:
        return self._edge_lookup.get(frozenset((u, v)))

    def call_atoms(self) -> tuple[Call, ...]:
        return tuple(e.atom for e in self.edges if isinstance(e.atom, Call))


@dataclass
class SystemRegistry:
    """An ordered collection of named systems; call targets resolve here."""

    systems: dict[str, FuzzySystem] = field(default_factory=dict)

    def add(self, system: FuzzySystem) -> None:
        if system.name in self.systems:
            raise ValueError(f"duplicate system name: {system.name!r}")
        self.systems[system.name] = system

    def __getitem__(self, name: str) -> FuzzySystem:
        try:
            return self.systems[name]
        except KeyError:
            raise UnknownSystemError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self.systems

    def __iter__(self) -> Iterator[FuzzySystem]:
        return iter(self.systems.values())

    def __len__(self) -> int:
        return len(self.systems)

    def names(self) -> tuple[str, ...]:
        return tuple(self.systems)

    def max_declared_count(self) -> int:
        """Largest call count declared anywhere in the registry (0 if none)."""
        return max((c.count for s in self for c in s.call_atoms()), default=0)


@dataclass(frozen=True)
class Diagnostic:
    system: str
    severity: str  # "error" | "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: system {self.system!r}: {self.message}"


def validate_registry(registry: SystemRegistry) -> list[Diagnostic]:
    """Semantic checks that parsing defers: call targets and terminal reach."""
    diagnostics = []
    for system in registry:
        for call in system.call_atoms():
            if call.target not in registry:
                diagnostics.append(
                    Diagnostic(system.name, "error", f"unknown call target {call.target!r}")
                )
        incident = {v for e in system.edges for v in (e.u, e.v)}
        for terminal in (system.input_terminal, system.output_terminal):
            if terminal not in incident:
                diagnostics.append(
                    Diagnostic(system.name, "warning", f"disconnected terminal {terminal!r}")
                )
    return diagnostics


# --- connection matrices --------------------------------------------------


class _UnitCell:
    """Singleton diagonal cell of a symbolic connection matrix."""

    def __repr__(self) -> str:
        return "ONE"


class _ZeroCell:
    """Singleton no-edge cell of a symbolic connection matrix."""

    def __repr__(self) -> str:
        return "ZERO"


ONE = _UnitCell()
ZERO = _ZeroCell()

Cell = object  # ONE | ZERO | Atom


def cell_text(cell: Cell) -> str:
    if cell is ONE:
        return "1"
    if cell is ZERO:
        return "0"
    return str(cell)


@dataclass(frozen=True)
class ConnectionMatrix:
    """Square symbolic matrix over a system's vertices.

    The diagonal is ONE, absent edges are ZERO, and the matrix is
    symmetric because edges are undirected.
    """

    vertices: tuple[str, ...]
    cells: tuple[tuple[Cell, ...], ...]

    def index(self, vertex: str) -> int:
        return self.vertices.index(vertex)


def connection_matrix(system: FuzzySystem) -> ConnectionMatrix:
    """The symbolic vertex-by-vertex matrix of a system."""
    rows = []
    for u in system.vertices:
        row: list[Cell] = []
        for v in system.vertices:
            if u == v:
                row.append(ONE)
            else:
                atom = system.edge_atom(u, v)
                row.append(ZERO if atom is None else atom)
        rows.append(tuple(row))
    return ConnectionMatrix(tuple(system.vertices), tuple(rows))


# --- definition files -----------------------------------------------------

_WS_RE = re.compile(r"\s+")


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _clauses(text: str) -> Iterator[tuple[int, int, str]]:
    """Yield (line, col, clause) with comments stripped.

    Clauses are separated by newlines and ';'.  A trailing '{' is kept
    with its clause; a '}' is its own clause.
    """
    for line_no, raw in enumerate(text.split("\n"), start=1):
        col = 1
        for piece in _strip_comment(raw).split(";"):
            stripped = piece.strip()
            if stripped:
                yield line_no, col + piece.index(stripped[0]), stripped
            col += len(piece) + 1


def parse_registry(text: str) -> SystemRegistry:
    """Parse definition text into a registry; empty input is an empty registry."""
    registry = SystemRegistry()
    current: str | None = None
    terminals: tuple[str, str] | None = None
    edges: list[tuple[str, str, Atom]] = []
    seen_pairs: set[frozenset[str]] = set()

    def finish(line: int, col: int) -> None:
        nonlocal current, terminals
        assert current is not None
        if terminals is None:
            raise ParseError(f"system {current!r} has no terminals clause", line, col)
        try:
            system = FuzzySystem.build(current, terminals[0], terminals[1], edges)
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None
        if current in registry:
            raise ParseError(f"duplicate system name: {current!r}", line, col)
        registry.add(system)
        current = None
        terminals = None

    for line_no, col, clause in _clauses(text):
        words = _WS_RE.split(clause)
        if current is None:
            if words[0] != "system":
                raise ParseError(f"expected 'system', got {words[0]!r}", line_no, col)
            if len(words) != 3 or words[2] != "{":
                raise ParseError("expected 'system <name> {'", line_no, col)
            if not is_identifier(words[1]):
                raise ParseError(f"invalid system name: {words[1]!r}", line_no, col)
            current = words[1]
            edges = []
            seen_pairs = set()
            continue
        if clause == "}":
            finish(line_no, col)
            continue
        if words[0] == "terminals":
            if len(words) != 4 or words[2] != "->":
                raise ParseError("expected 'terminals <in> -> <out>'", line_no, col)
            if terminals is not None:
                raise ParseError(f"system {current!r}: duplicate terminals clause", line_no, col)
            if not (is_identifier(words[1]) and is_identifier(words[3])):
                raise ParseError("terminal names must be identifiers", line_no, col)
            if words[1] == words[3]:
                raise ParseError("input and output terminals must differ", line_no, col)
            terminals = (words[1], words[3])
            continue
        if words[0] == "edge":
            if len(words) not in (4, 6):
                raise ParseError(
                    "expected 'edge <u> <v> <label>' or 'edge <u> <v> call <name> <count>'",
                    line_no,
                    col,
                )
            u, v = words[1], words[2]
            if not (is_identifier(u) and is_identifier(v)):
                raise ParseError("edge endpoints must be identifiers", line_no, col)
            if u == v:
                raise ParseError(f"self-loop at {u!r}", line_no, col)
            if frozenset((u, v)) in seen_pairs:
                raise ParseError(f"duplicate edge {u!r}-{v!r}", line_no, col)
            if len(words) == 4:
                if words[3] == "call":
                    raise ParseError("expected 'call <name> <count>' after endpoints", line_no, col)
                if not is_identifier(words[3]):
                    raise ParseError(f"invalid edge label: {words[3]!r}", line_no, col)
                atom: Atom = Var(words[3])
            else:
                if words[3] != "call":
                    raise ParseError(f"invalid edge label: {' '.join(words[3:])!r}", line_no, col)
                if not is_identifier(words[4]):
                    raise ParseError(f"invalid call target: {words[4]!r}", line_no, col)
                if not words[5].isdigit():
                    raise ParseError(
                        f"count not a non-negative integer: {words[5]!r}", line_no, col
                    )
                atom = Call(words[4], int(words[5]))
            seen_pairs.add(frozenset((u, v)))
            edges.append((u, v, atom))
            continue
        raise ParseError(f"unknown clause: {words[0]!r}", line_no, col)

    if current is not None:
        raise ParseError(f"unterminated system {current!r} (missing '}}')", 0, 0)
    return registry


def _atom_clause(atom: Atom) -> str:
    if isinstance(atom, Call):
        return f"call {atom.target} {atom.count}"
    return atom.name


def format_registry(registry: SystemRegistry) -> str:
    """Definition text that reparses to an identical registry."""
    blocks = []
    for system in registry:
        lines = [f"system {system.name} {{"]
        lines.append(f"  terminals {system.input_terminal} -> {system.output_terminal}")
        for edge in system.edges:
            lines.append(f"  edge {edge.u} {edge.v} {_atom_clause(edge.atom)}")
        lines.append("}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# --- assignments ----------------------------------------------------------


def parse_assignment(text: str) -> dict[str, float]:
    """Parse ``var = 0.3`` lines ('#' comments allowed) into a binding map."""
    assignment: dict[str, float] = {}
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        left, sep, right = line.partition("=")
        name = left.strip()
        value_text = right.strip()
        if not sep or not value_text:
            raise ParseError("expected '<var> = <decimal>'", line_no, 1)
        if not is_identifier(name):
            raise ParseError(f"invalid variable name: {name!r}", line_no, 1)
        try:
            value = float(value_text)
        except ValueError:
            raise ParseError(f"invalid decimal: {value_text!r}", line_no, 1) from None
        try:
            assignment[name] = check_grade(value, f"binding for {name!r}")
        except ValueError as exc:
            raise ParseError(str(exc), line_no, 1) from None
    return assignment


def format_assignment(assignment: dict[str, float]) -> str:
    return "".join(f"{name} = {value!r}\n" for name, value in assignment.items())


# --- built-in fixtures ----------------------------------------------------

#: A convenient total assignment for the fixture variables.
FIXTURE_ASSIGNMENT = {"x": 0.3, "y": 0.7, "w": 0.6, "z": 0.8, "xbar": 0.5}

# Every four-vertex fixture shares one diamond topology: terminals A and B,
# interior vertices C and D, with edges A-C, B-C, A-D, B-D, C-D.  A system's
# transmission function then has exactly four A->B chains:
#
#   A-D-B      (2 edges)    A-D-C-B    (3 edges)
#   A-C-B      (2 edges)    A-C-D-B    (3 edges)
#
# Each labeling below is reconstructed from the system's documented
# sum-of-products transmission: the C-D label is the atom the two 3-edge
# terms share, and the remaining labels fall out of pairwise term
# intersections (the match is unique for every system).  Edges are declared
# in the order that makes the enumerated chains spell the documented terms
# left to right, while keeping first-seen vertex order A, B, C, D.
_DIAMOND_EDGE_ORDER = ("BC", "AD", "BD", "AC", "CD")

_DIAMOND_LABELS: dict[str, dict[str, str]] = {
    # transmission: xz + x*xbar*w + yw + y*xbar*z
    "psi1": {"AC": "y", "AD": "x", "BC": "w", "BD": "z", "CD": "xbar"},
    # transmission: xbar*z + xbar*x*w + yw + y*x*z
    "psi2": {"AC": "y", "AD": "xbar", "BC": "w", "BD": "z", "CD": "x"},
    # transmission: xbar*z + xbar*w*x + yx + y*w*z
    "psi3": {"AC": "y", "AD": "xbar", "BC": "x", "BD": "z", "CD": "w"},
    # transmission: xbar*w + xbar*y*z + xz + x*y*w
    "psi4": {"AC": "x", "AD": "xbar", "BC": "z", "BD": "w", "CD": "y"},
    # transmission: xbar*y + xbar*w*z + xz + x*w*y
    "psi5": {"AC": "x", "AD": "xbar", "BC": "z", "BD": "y", "CD": "w"},
}


def _diamond(name: str, labels: dict[str, Atom | str]) -> FuzzySystem:
    edges = []
    for key in _DIAMOND_EDGE_ORDER:
        atom = labels[key]
        if isinstance(atom, str):
            atom = Var(atom)
        edges.append((key[0], key[1], atom))
    return FuzzySystem.build(name, "A", "B", edges)


def builtin_fixtures(
    phi_counts: dict[str, int] | None = None, rec_count: int = 2
) -> SystemRegistry:
    """The built-in example registry.

    Five diamond systems (psi1..psi5) with variable labels, a composite
    system ``phi`` whose five edges call them (counts configurable via
    ``phi_counts``, default 1 each), and ``psi1_rec``: psi1 with its C-D
    edge replaced by a self-call of count ``rec_count``.
    """
    counts = {f"psi{i}": 1 for i in range(1, 6)}
    if phi_counts:
        unknown = set(phi_counts) - set(counts)
        if unknown:
            raise ValueError(f"unknown phi call target(s): {sorted(unknown)!r}")
        counts.update(phi_counts)
    if rec_count < 0:
        raise ValueError("rec_count must be non-negative")

    registry = SystemRegistry()
    for name, labels in _DIAMOND_LABELS.items():
        registry.add(_diamond(name, dict(labels)))

    # phi's chains read psi2*psi4, psi2*psi1*psi5, psi3*psi1*psi4, psi3*psi5
    # in enumeration order, so its edge declarations start on the C side.
    registry.add(
        FuzzySystem.build(
            "phi",
            "A",
            "B",
            [
                ("A", "C", Call("psi2", counts["psi2"])),
                ("B", "C", Call("psi4", counts["psi4"])),
                ("C", "D", Call("psi1", counts["psi1"])),
                ("A", "D", Call("psi3", counts["psi3"])),
                ("B", "D", Call("psi5", counts["psi5"])),
            ],
        )
    )
    rec_labels: dict[str, Atom | str] = dict(_DIAMOND_LABELS["psi1"])
    rec_labels["CD"] = Call("psi1_rec", rec_count)
    registry.add(_diamond("psi1_rec", rec_labels))
    return registry
