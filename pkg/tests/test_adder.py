import itertools

import numpy as np
import pytest

from esp_router.adder import adder_layout, gen_cuccaro_adder, maj, toffoli, uma
from esp_router.circuit import Circuit, GateKind
from esp_router.statevector import apply_ops, ops_unitary, zero_state


@pytest.mark.parametrize("n, total", [(1, 45), (2, 82), (4, 156)])
def test_gate_totals(n, total):
    c = gen_cuccaro_adder(n)
    assert len(c.gates) == total == 37 * n + 8
    assert c.num_vars == 2 * n + 2
    assert c.measured == adder_layout(n)["b"] + [2 * n + 1]


def test_toffoli_is_ccx():
    U = ops_unitary(toffoli(0, 1, 2), 3)
    want = np.eye(8)
    want[[3, 7]] = want[[7, 3]]
    assert np.allclose(U, want, atol=1e-12)
    assert sum(k is GateKind.CNOT for k, _ in toffoli(0, 1, 2)) == 6


def test_maj_uma_inverse_pair():
    U = ops_unitary(maj(0, 1, 2) + uma(0, 1, 2), 3)
    # UMA undoes MAJ's carry and leaves the sum on b
    for c, b, a in itertools.product((0, 1), repeat=3):
        x = c | (b << 1) | (a << 2)
        y = int(np.argmax(np.abs(U[:, x])))
        assert (y & 1, (y >> 1) & 1, (y >> 2) & 1) == (c, b ^ a ^ c, a)


def classical_sum(n, a, b):
    lay = adder_layout(n)
    c = gen_cuccaro_adder(n, hadamards=False, measure=False)
    prep = [(GateKind.X, (lay["a"][i],)) for i in range(n) if a >> i & 1]
    prep += [(GateKind.X, (lay["b"][i],)) for i in range(n) if b >> i & 1]
    nq = c.num_vars
    psi = apply_ops(zero_state(nq), prep + [(g.kind, g.operands) for g in c.gates], nq)[0]
    probs = np.abs(psi) ** 2
    y = int(np.argmax(probs))
    s = sum(((y >> q) & 1) << i for i, q in enumerate(lay["b"] + [lay["z"]]))
    a_out = sum(((y >> q) & 1) << i for i, q in enumerate(lay["a"]))
    return s, a_out, probs[y], (y & 1)


@pytest.mark.parametrize("n", [1, 2])
def test_all_classical_inputs_add(n):
    for a, b in itertools.product(range(1 << n), repeat=2):
        s, a_out, p, carry_in = classical_sum(n, a, b)
        assert s == a + b
        assert a_out == a and carry_in == 0
        assert p == pytest.approx(1.0, abs=1e-12)


def test_rejects_zero_width():
    with pytest.raises(ValueError):
        gen_cuccaro_adder(0)


def test_identity_frame_has_no_effect():
    # the adder without its leading frame computes the same unitary
    c = gen_cuccaro_adder(1, hadamards=False, measure=False)
    body = Circuit(c.num_vars, c.gates[6:])
    U, V = ops_unitary([(g.kind, g.operands) for g in c.gates], 4), ops_unitary(
        [(g.kind, g.operands) for g in body.gates], 4)
    assert np.allclose(U, V, atol=1e-12)
