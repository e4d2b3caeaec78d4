"""Batched statevector kernels.

States are stored as rows of a ``(batch, 2**n)`` complex array, qubit ``q``
being bit ``q`` of the basis index (little-endian). Every supported gate is
applied as ``a * psi[:, perm] + b * psi`` for a cached ``(perm, a, b)``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .circuit import Circuit, GateKind

_R2 = 1 / np.sqrt(2)
_PHASE = {
    GateKind.S: 1j,
    GateKind.SDG: -1j,
    GateKind.T: np.exp(1j * np.pi / 4),
    GateKind.TDG: np.exp(-1j * np.pi / 4),
    "Z": -1.0,
}


@lru_cache(maxsize=None)
def _index(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


@lru_cache(maxsize=4096)
def gate_action(kind, operands: tuple[int, ...], n: int):
    """Return ``(perm, a, b)`` for a gate or a Pauli name ("X", "Y", "Z")."""
    idx = _index(n)
    if kind is GateKind.CNOT:
        c, t = operands
        perm = idx ^ (((idx >> c) & 1) << t)
        return perm, None, None
    (q,) = operands
    m = 1 << q
    bit = (idx >> q) & 1
    if kind in (GateKind.X, "X"):
        return idx ^ m, None, None
    if kind == "Y":
        return idx ^ m, np.where(bit, 1j, -1j), None
    if kind is GateKind.H:
        return idx ^ m, _R2, np.where(bit, -_R2, _R2)
    if kind in _PHASE:
        return None, None, np.where(bit, _PHASE[kind], 1.0)
    raise ValueError(f"no statevector action for {kind!r}")


def apply(states: np.ndarray, kind, operands, n: int) -> np.ndarray:
    perm, a, b = gate_action(kind, tuple(operands), n)
    if perm is None:
        return states * b
    moved = states[:, perm]
    if a is not None:
        moved = moved * a
    if b is not None:
        moved = moved + states * b
    return moved


def apply_ops(states: np.ndarray, ops, n: int) -> np.ndarray:
    for kind, operands in ops:
        if kind is GateKind.MEASURE:
            raise ValueError("measurement has no unitary action")
        states = apply(states, kind, operands, n)
    return states


def zero_state(n: int, batch: int = 1) -> np.ndarray:
    s = np.zeros((batch, 1 << n), dtype=complex)
    s[:, 0] = 1.0
    return s


def unitary_of(c: Circuit, max_qubits: int = 12) -> np.ndarray:
    """Exact unitary of a measurement-free circuit (little-endian basis)."""
    if c.num_vars > max_qubits:
        raise ValueError(f"{c.num_vars} qubits exceeds the cap of {max_qubits}")
    if any(g.kind is GateKind.MEASURE for g in c.gates):
        raise ValueError("circuit contains measurements")
    n = c.num_vars
    rows = apply_ops(np.eye(1 << n, dtype=complex), ((g.kind, g.operands) for g in c.gates), n)
    return rows.T


def ops_unitary(ops, n: int) -> np.ndarray:
    return apply_ops(np.eye(1 << n, dtype=complex), ops, n).T


def marginal_probs(states: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """Born probabilities of ``qubits`` (bit i of the outcome = qubits[i])."""
    probs = np.abs(states) ** 2
    idx = _index(n)
    out_idx = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        out_idx |= ((idx >> q) & 1) << i
    fold = np.zeros((1 << n, 1 << len(qubits)))
    fold[idx, out_idx] = 1.0
    return probs @ fold
