from __future__ import annotations

import pytest

from fuzzchain.algebra import canonicalize, format_expr, parse_expr
from fuzzchain.chains import (
    ChainSpace,
    best_chain_value,
    chain_atoms,
    chain_value,
    derive_ftf,
    enumerate_chains,
    lift_chain_space,
)
from fuzzchain.errors import FuzzchainError
from fuzzchain.oracles import oracle_path_enum
from fuzzchain.rng import SplitMix64

# Sum-of-products transmission functions worked out by hand for the five
# built-in diamonds (terminals A/B, inner vertices C/D), as a (display,
# parseable) pair per system.  The display form juxtaposes single-letter
# factors; the order pins enumeration: 2-edge chain through D, 3-edge
# chain through D then C, 2-edge chain through C, 3-edge through C then D.
HAND_DERIVED = {
    "psi1": ("xz + x*xbar*w + yw + y*xbar*z", "x*z + x*xbar*w + y*w + y*xbar*z"),
    "psi2": ("xbar*z + xbar*x*w + yw + yxz", "xbar*z + xbar*x*w + y*w + y*x*z"),
    "psi3": ("xbar*z + xbar*w*x + yx + ywz", "xbar*z + xbar*w*x + y*x + y*w*z"),
    "psi4": ("xbar*w + xbar*y*z + xz + xyw", "xbar*w + xbar*y*z + x*z + x*y*w"),
    "psi5": ("xbar*y + xbar*w*z + xz + xwy", "xbar*y + xbar*w*z + x*z + x*w*y"),
}

PHI_DERIVED = "psi2^1*psi4^1 + psi2^1*psi1^1*psi5^1 + psi3^1*psi1^1*psi4^1 + psi3^1*psi5^1"


def test_enumerate_chains_orders(registry):
    def ids(name):
        return ["-".join(c) for c in enumerate_chains(registry[name])]

    assert ids("psi1") == ["A-D-B", "A-D-C-B", "A-C-B", "A-C-D-B"]
    assert ids("phi") == ["A-C-B", "A-C-D-B", "A-D-C-B", "A-D-B"]
    assert ids("psi1_rec") == ids("psi1")


def test_chain_atoms_in_path_order(registry):
    psi1 = registry["psi1"]
    atoms = chain_atoms(psi1, ("A", "D", "C", "B"))
    assert [str(a) for a in atoms] == ["x", "xbar", "w"]
    with pytest.raises(FuzzchainError, match="no edge 'A'-'B'"):
        chain_atoms(psi1, ("A", "B"))


@pytest.mark.parametrize("name, expected", sorted(HAND_DERIVED.items()))
def test_derive_ftf_diamonds(registry, name, expected):
    display, raw = expected
    derived = derive_ftf(registry[name])
    assert format_expr(derived, "paper") == display
    assert format_expr(derived, "raw") == raw
    # same term set after canonicalization, whatever the authored order
    assert canonicalize(derived) == canonicalize(parse_expr(raw))


def test_derive_ftf_composite(registry):
    derived = derive_ftf(registry["phi"])
    assert format_expr(derived, "raw") == PHI_DERIVED
    assert canonicalize(derived) == canonicalize(parse_expr(PHI_DERIVED))


def test_chain_space_validation():
    with pytest.raises(ValueError, match="degree must be at least 1"):
        ChainSpace(0, ("a",), ((1.0,),))
    with pytest.raises(ValueError, match="square"):
        ChainSpace(1, ("a", "b"), ((0.5,),))
    with pytest.raises(ValueError, match="out of range"):
        ChainSpace(1, ("a",), ((1.5,),))


TRIANGLE = ChainSpace(
    1,
    ("p0", "p1", "p2"),
    ((1.0, 0.2, 0.7), (0.2, 1.0, 0.4), (0.7, 0.4, 1.0)),
)


def test_chain_value_is_min_of_steps():
    assert chain_value(TRIANGLE, (0, 1)) == 0.2
    assert chain_value(TRIANGLE, (0, 2, 1)) == 0.4
    assert chain_value(TRIANGLE, (0, 2, 2, 1)) == 0.4  # repeats allowed, still a min
    with pytest.raises(ValueError, match="at least two items"):
        chain_value(TRIANGLE, (0,))
    with pytest.raises(ValueError, match="index out of range"):
        chain_value(TRIANGLE, (0, 9))


def test_best_chain_value_triangle():
    # direct step 0->1 is 0.2; the detour through 2 lifts it to min(0.7, 0.4)
    assert best_chain_value(TRIANGLE, 0, 1) == 0.4
    assert best_chain_value(TRIANGLE, 2, 2) == 1.0
    with pytest.raises(ValueError, match="index out of range"):
        best_chain_value(TRIANGLE, 0, 3)


def test_lift_chain_space():
    lifted = lift_chain_space(("c1", "c2"), [[1.0, 0.3], [0.3, 1.0]], 2)
    assert lifted.degree == 2
    assert lifted.items == ("c1", "c2")
    assert lifted.mu == ((1.0, 0.3), (0.3, 1.0))
    with pytest.raises(ValueError, match="degree 2"):
        lift_chain_space(("c1",), [[1.0]], 1)


def test_best_chain_value_matches_path_oracle():
    rng = SplitMix64(23)
    for _ in range(100):
        n = rng.randint(2, 6)
        items = tuple(f"i{k}" for k in range(n))
        mu = tuple(tuple(rng.grade() for _ in range(n)) for _ in range(n))
        space = ChainSpace(1, items, mu)
        edge_value = {
            (items[i], items[j]): mu[i][j] for i in range(n) for j in range(n) if i != j
        }
        start, end = rng.below(n), rng.below(n)
        want = (
            1.0
            if start == end
            else max(
                oracle_path_enum(items, edge_value, items[start], items[end]),
                mu[start][end],
            )
        )
        assert best_chain_value(space, start, end) == want
