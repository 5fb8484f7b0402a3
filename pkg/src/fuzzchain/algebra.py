"""Max-min scalar algebra and sum-of-products transmission expressions.

The scalar domain is the closed interval [0, 1] with ``max`` playing the
role of addition and ``min`` the role of multiplication.  Neither
operation ever manufactures a new number — every result is one of the
inputs — so exact float equality is sound everywhere in this package and
no tolerance is used.

A transmission expression (:class:`FtfExpr`) is a union (max) of terms;
a term (:class:`Term`) is a concatenation (min) of atoms.  An atom is
either a plain variable (:class:`Var`) or a budget-counted call to a
named system (:class:`Call`).  Terms keep construction order and
duplicate atoms — the "raw" form — so composed expressions can be shown
exactly as they were built (``xxzw`` stays ``xxzw``).  Comparisons use
the canonical form produced by :func:`canonicalize`: atoms sorted and
deduplicated within each term, terms sorted and deduplicated within the
expression.

The empty term denotes the constant 1; the empty expression denotes the
constant 0.  Those are also the units of concatenation and union.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import BindingError, ParseError

__all__ = [
    "Var",
    "Call",
    "Atom",
    "Term",
    "FtfExpr",
    "MultinomialEntry",
    "snorm_max",
    "tnorm_min",
    "check_grade",
    "eval_expr",
    "assignment_valuation",
    "expr_union",
    "expr_concat",
    "canonicalize",
    "expr_power",
    "multinomial_coefficient",
    "multinomial_expand",
    "parse_expr",
    "format_expr",
    "is_identifier",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(name: str) -> bool:
    """True when ``name`` is a bare identifier: ``[A-Za-z_][A-Za-z0-9_]*``."""
    return bool(_IDENT_RE.match(name))


def snorm_max(a: float, b: float) -> float:
    """Union of two membership grades (the s-norm): ``max``."""
    return a if a >= b else b


def tnorm_min(a: float, b: float) -> float:
    """Concatenation of two membership grades (the t-norm): ``min``."""
    return a if a <= b else b


def check_grade(value: float, what: str = "membership") -> float:
    """Validate that ``value`` is a membership grade in [0, 1] and return it."""
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{what} out of range [0, 1]: {value!r}")
    return value


@dataclass(frozen=True)
class Var:
    """A plain variable atom."""

    name: str

    def __post_init__(self) -> None:
        if not is_identifier(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Call:
    """A call atom: evaluate system ``target`` with declared budget ``count``.

    ``count`` is how many nested call activations the atom is allowed to
    spend, not an exponent; a count of 0 means the call can never run.
    """

    target: str
    count: int

    def __post_init__(self) -> None:
        if not is_identifier(self.target):
            raise ValueError(f"invalid call target: {self.target!r}")
        if not isinstance(self.count, int) or self.count < 0:
            raise ValueError(f"call count must be a non-negative integer: {self.count!r}")

    def __str__(self) -> str:
        return f"{self.target}^{self.count}"


Atom = Union[Var, Call]


def _atom_key(atom: Atom) -> tuple:
    # Variables sort before calls; within a kind, by name then count.
    if isinstance(atom, Var):
        return (0, atom.name, 0)
    return (1, atom.target, atom.count)


@dataclass(frozen=True)
class Term:
    """A concatenation (min) of atoms, in construction order.

    Duplicates are preserved; ``canonical()`` sorts and deduplicates.
    The empty term is the constant 1.
    """

    atoms: tuple[Atom, ...] = ()

    def canonical(self) -> "Term":
        return Term(tuple(sorted(set(self.atoms), key=_atom_key)))

    def atom_set(self) -> frozenset[Atom]:
        return frozenset(self.atoms)

    def key(self) -> tuple:
        return tuple(_atom_key(a) for a in self.atoms)

    def __str__(self) -> str:
        return format_term(self, "raw")


@dataclass(frozen=True)
class FtfExpr:
    """A union (max) of terms, in construction order.

    The empty expression is the constant 0.
    """

    terms: tuple[Term, ...] = ()

    @staticmethod
    def zero() -> "FtfExpr":
        return FtfExpr(())

    @staticmethod
    def one() -> "FtfExpr":
        return FtfExpr((Term(()),))

    @staticmethod
    def of(*terms: Iterable[Atom]) -> "FtfExpr":
        return FtfExpr(tuple(Term(tuple(t)) for t in terms))

    def atoms(self) -> Iterator[Atom]:
        for term in self.terms:
            yield from term.atoms

    def __str__(self) -> str:
        return format_expr(self, "raw")


Valuation = Callable[[Atom], float]


def assignment_valuation(assignment: Mapping[str, float]) -> Valuation:
    """Valuation over plain variables; rejects call atoms and missing names."""

    def value_of(atom: Atom) -> float:
        if isinstance(atom, Call):
            raise BindingError(f"unresolved call atom: {atom}")
        try:
            return assignment[atom.name]
        except KeyError:
            raise BindingError(f"missing binding for variable {atom.name!r}") from None

    return value_of


def eval_expr(expr: FtfExpr, valuation: Valuation) -> float:
    """Max over terms of the min over each term's atom values.

    The empty expression evaluates to 0 and the empty term to 1.  The
    result is always one of the valuation's outputs, 0, or 1.
    """
    best = 0.0
    for term in expr.terms:
        value = 1.0
        for atom in term.atoms:
            value = tnorm_min(value, valuation(atom))
        best = snorm_max(best, value)
    return best


def expr_union(a: FtfExpr, b: FtfExpr) -> FtfExpr:
    """Term-multiset union; evaluates to max of the operands."""
    return FtfExpr(a.terms + b.terms)


def expr_concat(a: FtfExpr, b: FtfExpr) -> FtfExpr:
    """Pairwise term concatenation; evaluates to min of the operands.

    Term order is the cross product in operand order, so raw renderings
    stay predictable.
    """
    return FtfExpr(tuple(Term(s.atoms + t.atoms) for s in a.terms for t in b.terms))


def canonicalize(expr: FtfExpr, simplify: bool = False) -> FtfExpr:
    """Sorted, deduplicated form of ``expr``; optionally absorption-simplified.

    With ``simplify`` every term whose atom set is a strict superset of
    another term's atom set is dropped (it can never win the max).
    Simplification never changes the value of the expression.
    """
    terms = sorted({t.canonical() for t in expr.terms}, key=Term.key)
    if simplify:
        sets = [t.atom_set() for t in terms]
        kept = [
            t
            for i, t in enumerate(terms)
            if not any(j != i and sets[j] < sets[i] for j in range(len(terms)))
        ]
        terms = kept
    return FtfExpr(tuple(terms))


def expr_power(expr: FtfExpr, k: int) -> FtfExpr:
    """k-fold concatenation of ``expr`` with itself, canonicalized.

    ``k`` must be at least 1; the zeroth power is deliberately undefined
    in this algebra.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"undefined power: k must be an integer >= 1, got {k!r}")
    out = expr
    for _ in range(k - 1):
        out = expr_concat(out, expr)
    return canonicalize(out)


def multinomial_coefficient(k: int, parts: Iterable[int]) -> int:
    """Exact k! / (n1! * ... * nm!) for a composition of k."""
    parts = tuple(parts)
    if any(not isinstance(n, int) or n < 0 for n in parts):
        raise ValueError(f"invalid composition: negative or non-integer part in {parts!r}")
    if sum(parts) != k:
        raise ValueError(f"invalid composition: parts {parts!r} do not sum to {k}")
    coefficient = math.factorial(k)
    for n in parts:
        coefficient //= math.factorial(n)
    return coefficient


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MultinomialEntry:
    """One composition of the multinomial expansion of an expression power.

    ``term`` is the raw concatenation of the i-th base term repeated
    ``composition[i]`` times.  The coefficient is classical bookkeeping:
    it never changes a max-min value because union is idempotent.
    """

    composition: tuple[int, ...]
    coefficient: int
    term: Term


def multinomial_expand(expr: FtfExpr, k: int) -> list[MultinomialEntry]:
    """All compositions (n1..nm) of k over the m terms of ``expr``.

    Entries are ordered with the leading part descending, so ``(k,0,..)``
    comes first and ``(0,..,k)`` last.  The caller is expected to keep m
    and k small; the list has C(k+m-1, m-1) entries.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"undefined power: k must be an integer >= 1, got {k!r}")
    m = len(expr.terms)
    entries = []
    for composition in _compositions(k, m):
        atoms: tuple[Atom, ...] = ()
        for term, n in zip(expr.terms, composition):
            atoms += term.atoms * n
        entries.append(
            MultinomialEntry(composition, multinomial_coefficient(k, composition), Term(atoms))
        )
    return entries


# --- parsing -------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+|[+*^]|\S")


class _Token:
    __slots__ = ("text", "line", "col")

    def __init__(self, text: str, line: int, col: int):
        self.text = text
        self.line = line
        self.col = col


def _tokenize_expr(text: str) -> list[_Token]:
    tokens = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        for match in _TOKEN_RE.finditer(line):
            tokens.append(_Token(match.group(), line_no, match.start() + 1))
    return tokens


def parse_expr(text: str) -> FtfExpr:
    """Parse ``"x*z + psi1^2*w"`` style text into a raw expression.

    Terms are '+'-separated, atoms within a term '*'-separated, and a
    call atom is written ``name^count``.  Whitespace is ignored.  The
    special forms ``0`` and ``1`` denote the empty expression and the
    single-empty-term expression.  Raises :class:`ParseError` with line
    and column on bad input.
    """
    tokens = _tokenize_expr(text)
    if not tokens:
        return FtfExpr.zero()
    if len(tokens) == 1 and tokens[0].text == "0":
        return FtfExpr.zero()
    if len(tokens) == 1 and tokens[0].text == "1":
        return FtfExpr.one()

    pos = 0

    def fail(message: str, token: _Token | None = None) -> ParseError:
        if token is None:
            last = tokens[-1]
            return ParseError(message, last.line, last.col + len(last.text))
        return ParseError(message, token.line, token.col)

    def next_token() -> _Token:
        nonlocal pos
        if pos >= len(tokens):
            raise fail("unexpected end of expression")
        token = tokens[pos]
        pos += 1
        return token

    def parse_atom() -> Atom:
        nonlocal pos
        token = next_token()
        if not is_identifier(token.text):
            raise fail(f"expected an atom, got {token.text!r}", token)
        if pos < len(tokens) and tokens[pos].text == "^":
            pos += 1
            count_token = next_token()
            if not count_token.text.isdigit():
                raise fail(
                    f"count not a non-negative integer: {count_token.text!r}", count_token
                )
            return Call(token.text, int(count_token.text))
        return Var(token.text)

    def parse_term() -> Term:
        nonlocal pos
        atoms = [parse_atom()]
        while pos < len(tokens) and tokens[pos].text == "*":
            pos += 1
            atoms.append(parse_atom())
        return Term(tuple(atoms))

    terms = [parse_term()]
    while pos < len(tokens):
        token = next_token()
        if token.text != "+":
            raise fail(f"expected '+' between terms, got {token.text!r}", token)
        terms.append(parse_term())
    return FtfExpr(tuple(terms))


# --- formatting ----------------------------------------------------------

_MODES = ("raw", "canonical", "paper")


def _atom_str(atom: Atom) -> str:
    return str(atom)


def format_term(term: Term, mode: str = "raw") -> str:
    """Render one term.  ``paper`` juxtaposes single-character variables."""
    if mode not in _MODES:
        raise ValueError(f"unknown format mode: {mode!r}")
    atoms = term.canonical().atoms if mode == "canonical" else term.atoms
    if not atoms:
        return "1"
    if mode == "paper" and all(isinstance(a, Var) and len(a.name) == 1 for a in atoms):
        return "".join(a.name for a in atoms)
    return "*".join(_atom_str(a) for a in atoms)


def format_expr(expr: FtfExpr, mode: str = "raw") -> str:
    """Render an expression; ``parse_expr`` inverts the raw/canonical modes.

    ``raw`` keeps construction order, ``canonical`` renders the canonical
    form, and ``paper`` keeps construction order but joins all-single-
    character-variable terms without stars (so ``x*z`` shows as ``xz``).
    """
    if mode not in _MODES:
        raise ValueError(f"unknown format mode: {mode!r}")
    if mode == "canonical":
        expr = canonicalize(expr)
        term_mode = "raw"
    else:
        term_mode = mode
    if not expr.terms:
        return "0"
    return " + ".join(format_term(t, term_mode) for t in expr.terms)
