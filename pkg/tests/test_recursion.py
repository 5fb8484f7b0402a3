from __future__ import annotations

import pytest

from fuzzchain.algebra import assignment_valuation, eval_expr, format_expr
from fuzzchain.checks import random_assignment, random_registry
from fuzzchain.errors import UnknownSystemError
from fuzzchain.oracles import oracle_unroll_eval
from fuzzchain.recursion import (
    Enter,
    Exit,
    PopReturn,
    PushReturn,
    eval_system,
    expansion_tree,
    render_expansion,
    render_trace,
    resolve_call,
    stabilization_budget,
    symbolic_expand,
    trace_eval,
)
from fuzzchain.rng import SplitMix64
from fuzzchain.systems import parse_registry

# One full unroll of psi1_rec at its declared self-call budget of 2: the
# call-free chains first, then each call chain with its callee expanded
# in parentheses.  At the innermost level the budget is spent and only
# the call-free chains survive.
REC2_NESTED = (
    "xz + yw"
    " + x(xz + yw + x(xz + yw)w + y(xz + yw)z)w"
    " + y(xz + yw + x(xz + yw)w + y(xz + yw)z)z"
)
REC2_FLAT = (
    "xz + yw + xxzw + xyww + xxxzww + xxywww + xyxzzw + xyywzw"
    " + yxzz + yywz + yxxzwz + yxywwz + yyxzzz + yyywzz"
)


def test_eval_system_fixture_values(registry, fixture_assignment):
    values = {name: eval_system(registry, name, fixture_assignment) for name in registry.names()}
    assert values == {
        "psi1": 0.6,
        "psi2": 0.6,
        "psi3": 0.6,
        "psi4": 0.5,
        "psi5": 0.5,
        "phi": 0.5,
        "psi1_rec": 0.6,
    }


def test_unknown_system_and_bad_budget(registry, fixture_assignment):
    with pytest.raises(UnknownSystemError):
        eval_system(registry, "psi9", fixture_assignment)
    with pytest.raises(UnknownSystemError):
        resolve_call(registry, "psi9", 1, fixture_assignment)
    with pytest.raises(ValueError, match="budget must be >= 0"):
        resolve_call(registry, "psi1", -1, fixture_assignment)


def test_stabilization_budget(registry, variant_registry):
    assert stabilization_budget(registry) == 3  # psi1_rec declares count 2
    assert stabilization_budget(variant_registry) == 3


def test_budget_staircase_on_variant(variant_registry, deep_assignment):
    assignment = dict(deep_assignment, xbar=0.95)
    values = [resolve_call(variant_registry, "psi1v", k, assignment) for k in range(7)]
    # dead call below budget 2, full strength from there on
    assert values == [0.2, 0.2, 0.8, 0.8, 0.8, 0.8, 0.8]
    assert eval_system(variant_registry, "psi1v", assignment) == 0.8
    assert eval_system(variant_registry, "psi1", assignment) == 0.8


def test_self_call_budget_is_irrelevant(registry, fixture_assignment, deep_assignment):
    # a system whose only call targets itself evaluates as if the call
    # edge were deleted, at every budget
    for assignment in (fixture_assignment, deep_assignment):
        floor = resolve_call(registry, "psi1_rec", 0, assignment)
        for k in range(1, 7):
            assert resolve_call(registry, "psi1_rec", k, assignment) == floor
        assert eval_system(registry, "psi1_rec", assignment) == floor


def test_values_stabilize_at_registry_ceiling(registry, fixture_assignment):
    ceiling = stabilization_budget(registry)
    for name in registry.names():
        stabilized = resolve_call(registry, name, ceiling, fixture_assignment)
        assert eval_system(registry, name, fixture_assignment) == stabilized
        assert resolve_call(registry, name, ceiling + 3, fixture_assignment) == stabilized


def test_expansion_tree_structure(registry):
    tree = expansion_tree(registry, "psi1_rec")
    assert tree.system == "psi1_rec"
    assert tree.budget is None
    chains = ["-".join(b.chain) for b in tree.branches]
    # call-free branches first, then the two call chains in chain order
    assert chains == ["A-D-B", "A-C-B", "A-D-C-B", "A-C-D-B"]
    assert not tree.branches[0].has_calls()
    assert tree.branches[2].has_calls()
    child = tree.branches[2].segments[1]
    assert child.system == "psi1_rec"
    assert child.budget == 2
    grandchild = child.branches[2].segments[1]
    assert grandchild.budget == 1
    assert len(grandchild.branches) == 2  # deeper calls are dead


def test_render_expansion_nested_and_flat(registry):
    assert render_expansion(expansion_tree(registry, "psi1_rec")) == REC2_NESTED
    assert format_expr(symbolic_expand(registry, "psi1_rec"), "paper") == REC2_FLAT


def test_expansion_with_spent_budget_shows_the_base_case(registry):
    node = expansion_tree(registry, "psi1_rec", budget=0)
    assert render_expansion(node) == "xz + yw"
    assert render_expansion(expansion_tree(registry, "psi1_rec", budget=1)) == "xz + yw"


def test_expansion_of_a_system_with_no_live_chains():
    registry = parse_registry(
        """
        system s {
          terminals A -> B
          edge A B call s 1
        }
        """
    )
    assert render_expansion(expansion_tree(registry, "s", budget=0)) == "0"
    assert resolve_call(registry, "s", 0, {}) == 0.0
    assert eval_system(registry, "s", {}) == 0.0  # the self-call can never bottom out


def test_symbolic_expand_evaluates_like_the_engine(registry, fixture_assignment, deep_assignment):
    for name in registry.names():
        for assignment in (fixture_assignment, dict(deep_assignment, xbar=0.5)):
            flat = symbolic_expand(registry, name, None)
            value = eval_expr(flat, assignment_valuation(assignment))
            assert value == eval_system(registry, name, assignment)


def test_trace_on_a_call_free_system(registry, fixture_assignment):
    result = trace_eval(registry, "psi1", fixture_assignment)
    assert result.value == 0.6
    lines = result.lines()
    assert lines[0] == "ENTER system=psi1 budget=top"
    assert lines[1] == "BRANCH chain=A-D-B expr=xz value=0.3"
    assert lines[2] == "BRANCH chain=A-D-C-B expr=x*xbar*w value=0.3"
    assert lines[3] == "BRANCH chain=A-C-B expr=yw value=0.6"
    assert lines[4] == "BRANCH chain=A-C-D-B expr=y*xbar*z value=0.5"
    assert lines[5] == "EXIT system=psi1 value=0.6"
    assert len(lines) == 6
    assert not [e for e in result.events if isinstance(e, (PushReturn, PopReturn))]


def test_trace_recursive_descent(registry, deep_assignment):
    result = trace_eval(registry, "psi1_rec", deep_assignment)
    assert result.value == 0.2
    lines = result.lines()
    assert lines[0] == "ENTER system=psi1_rec budget=top"
    assert lines[-1] == "EXIT system=psi1_rec value=0.2"
    # each chain with one live call reports every callee alternative
    assert "BRANCH chain=A-D-C-B sub=A-C-B expr=x(yw)w value=0.2" in lines
    assert "BRANCH chain=A-C-D-B sub=A-D-C-B expr=y(xxzw + xyww)z value=0.1" in lines
    assert (
        "BRANCH chain=A-C-D-B expr=y(xz + yw + xxzw + xyww + yxzz + yywz)z value=0.1"
        in lines
    )
    assert render_trace(result.events) == "\n".join(lines)


def test_trace_stack_is_balanced_and_nested(registry, deep_assignment):
    events = trace_eval(registry, "psi1_rec", deep_assignment).events
    stack = []
    for event in events:
        if isinstance(event, PushReturn):
            stack.append(event.label)
        elif isinstance(event, PopReturn):
            assert stack.pop() == event.label  # strictly LIFO
    assert stack == []
    # the outer descent through A-C-D-B (return z) contains an inner one
    # through A-D-C-B (return w)
    labels = [
        ("push" if isinstance(e, PushReturn) else "pop", e.label)
        for e in events
        if isinstance(e, (PushReturn, PopReturn))
    ]
    want = [("push", "z"), ("push", "w"), ("pop", "w"), ("pop", "z")]
    position = 0
    for item in labels:
        if position < len(want) and item == want[position]:
            position += 1
    assert position == len(want)


def test_trace_is_not_memoized(registry, deep_assignment):
    events = trace_eval(registry, "psi1_rec", deep_assignment).events
    enters = [e for e in events if isinstance(e, Enter)]
    exits = [e for e in events if isinstance(e, Exit)]
    # 1 top entry, 2 full budget-2 descents, each holding 2 budget-1 descents
    assert len(enters) == len(exits) == 7
    assert [e.budget for e in enters] == [None, 2, 1, 1, 2, 1, 1]


def test_trace_value_always_matches_eval():
    rng = SplitMix64(314)
    for _ in range(60):
        registry = random_registry(rng, n_systems=2, max_vertices=5, max_count=2)
        name = registry.names()[-1]
        assignment = random_assignment(rng)
        top = eval_system(registry, name, assignment)
        assert trace_eval(registry, name, assignment).value == top
        flat = symbolic_expand(registry, name)
        assert eval_expr(flat, assignment_valuation(assignment)) == top
        assert oracle_unroll_eval(registry, name, assignment) == top


def test_budget_variation_sweeps_random_systems():
    rng = SplitMix64(2718)
    for trial in range(40):
        registry = random_registry(rng, n_systems=2, self_only=trial % 2 == 0)
        name = registry.names()[-1]
        assignment = random_assignment(rng)
        ceiling = stabilization_budget(registry)
        values = [
            resolve_call(registry, name, k, assignment) for k in range(ceiling + 3)
        ]
        for lo, hi in zip(values, values[1:]):
            assert lo <= hi
        assert values[-1] == values[ceiling]
        assert eval_system(registry, name, assignment) == values[ceiling]
