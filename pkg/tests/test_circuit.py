import itertools

import pytest
from hypothesis import given, settings, strategies as st

from esp_router.circuit import Circuit, CircuitError, Gate, GateKind, build_dependencies

CX, H, M, X = GateKind.CNOT, GateKind.H, GateKind.MEASURE, GateKind.X


def test_gate_arity_and_distinct_operands():
    with pytest.raises(CircuitError):
        Gate(CX, (0,))
    with pytest.raises(CircuitError):
        Gate(H, (0, 1))
    with pytest.raises(CircuitError):
        Gate(CX, (2, 2))
    with pytest.raises(CircuitError):
        Gate(H, (-1,))


def test_circuit_renumbers_and_counts():
    c = Circuit.from_ops(3, [("h", 0), (CX, (0, 1)), ("cx", (1, 2)), (M, (2,))])
    assert [g.seq for g in c.gates] == [0, 1, 2, 3]
    assert c.num_cnots == 2
    assert c.measured == [2]
    assert c.counts() == {"h": 1, "cx": 2, "measure": 1}
    assert len(c.without_measures()) == 3


def test_operand_out_of_range():
    with pytest.raises(CircuitError, match="out of range"):
        Circuit.from_ops(2, [(CX, (0, 2))])


def test_measure_is_terminal():
    with pytest.raises(CircuitError, match="after its measurement"):
        Circuit.from_ops(2, [(M, (0,)), (CX, (0, 1))])
    # other variables may still be used
    Circuit.from_ops(2, [(M, (0,)), (X, (1,))])


def test_dependencies_latest_sharing_gate():
    c = Circuit.from_ops(3, [(H, 0), (H, 1), (CX, (0, 1)), (X, 2), (CX, (1, 2)), (M, 0)])
    dag = build_dependencies(c)
    assert dag.preds == ((), (), (0, 1), (), (2, 3), (2,))
    assert dag.successors()[2] == [4, 5]


def test_topological_orders_small():
    c = Circuit.from_ops(4, [(CX, (0, 1)), (CX, (2, 3)), (CX, (1, 2))])
    orders = set(build_dependencies(c).topological_orders())
    assert orders == {(0, 1, 2), (1, 0, 2)}
    assert len(list(build_dependencies(c).topological_orders(limit=1))) == 1


ops_strategy = st.lists(
    st.one_of(
        st.tuples(st.sampled_from([H, X, GateKind.T]), st.integers(0, 3)).map(lambda t: (t[0], (t[1],))),
        st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda p: p[0] != p[1]).map(lambda p: (CX, p)),
    ),
    max_size=7,
)


@settings(max_examples=60, deadline=None)
@given(ops_strategy)
def test_topological_orders_are_exactly_the_valid_ones(ops):
    c = Circuit.from_ops(4, ops)
    dag = build_dependencies(c)
    got = set(dag.topological_orders())
    # oracle: permutations keeping the relative order of gates on each variable
    want = set()
    for perm in itertools.permutations(range(len(ops))):
        if all([i for i in perm if v in c.gates[i].operands] == sorted(i for i in perm if v in c.gates[i].operands)
               for v in range(4)):
            want.add(perm)
    assert got == want
