"""Gate-level circuit representation and gate dependencies."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CircuitError(ValueError):
    """Raised when a circuit violates a structural invariant."""


class GateKind(Enum):
    H = "h"
    X = "x"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CNOT = "cx"
    MEASURE = "measure"

    @property
    def arity(self) -> int:
        return 2 if self is GateKind.CNOT else 1

    @property
    def is_single(self) -> bool:
        """True for one-qubit unitary gates (error class G)."""
        return self not in (GateKind.CNOT, GateKind.MEASURE)


SINGLE_QUBIT_KINDS = tuple(k for k in GateKind if k.is_single)


@dataclass(frozen=True)
class Gate:
    """One operation. For CNOT, ``operands`` is ``(control, target)``."""

    kind: GateKind
    operands: tuple[int, ...]
    seq: int = 0

    def __post_init__(self):
        if len(self.operands) != self.kind.arity:
            raise CircuitError(
                f"{self.kind.value} takes {self.kind.arity} operand(s), got {len(self.operands)}")
        if len(set(self.operands)) != len(self.operands):
            raise CircuitError(f"{self.kind.value} operands must be distinct: {self.operands}")
        if any(q < 0 for q in self.operands):
            raise CircuitError(f"negative operand in {self.operands}")

    def same_op(self, other: "Gate") -> bool:
        return self.kind is other.kind and self.operands == other.operands

    def __str__(self):
        return f"{self.kind.value}({','.join(map(str, self.operands))})"


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``num_vars`` logical variables.

    Gates are renumbered so ``gates[i].seq == i``. Measurement is terminal:
    once a variable is measured no further gate may touch it.
    """

    num_vars: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        if self.num_vars < 0:
            raise CircuitError("num_vars must be non-negative")
        gates = tuple(g if g.seq == i else Gate(g.kind, g.operands, i)
                      for i, g in enumerate(self.gates))
        object.__setattr__(self, "gates", gates)
        measured: set[int] = set()
        for g in gates:
            for q in g.operands:
                if q >= self.num_vars:
                    raise CircuitError(f"operand {q} out of range for {self.num_vars} variables")
                if q in measured:
                    raise CircuitError(f"gate {g} acts on variable {q} after its measurement")
            if g.kind is GateKind.MEASURE:
                measured.add(g.operands[0])

    @classmethod
    def from_ops(cls, num_vars: int, ops) -> "Circuit":
        """Build from ``(kind, operands)`` pairs; kinds may be GateKind or qasm names."""
        gates = []
        for kind, operands in ops:
            if not isinstance(kind, GateKind):
                kind = GateKind(kind)
            if isinstance(operands, int):
                operands = (operands,)
            gates.append(Gate(kind, tuple(operands)))
        return cls(num_vars, tuple(gates))

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def num_cnots(self) -> int:
        return sum(g.kind is GateKind.CNOT for g in self.gates)

    @property
    def measured(self) -> list[int]:
        """Measured variables in measurement order."""
        return [g.operands[0] for g in self.gates if g.kind is GateKind.MEASURE]

    def without_measures(self) -> "Circuit":
        return Circuit(self.num_vars, tuple(g for g in self.gates if g.kind is not GateKind.MEASURE))

    def same_ops(self, other: "Circuit") -> bool:
        return (self.num_vars == other.num_vars and len(self.gates) == len(other.gates)
                and all(a.same_op(b) for a, b in zip(self.gates, other.gates)))

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind.value] = out.get(g.kind.value, 0) + 1
        return out


@dataclass(frozen=True)
class DependencyDAG:
    """Immediate predecessors of each gate.

    Gate ``g`` depends on ``g'`` iff ``g'`` is the latest earlier gate that
    shares an operand with ``g``.
    """

    preds: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.preds)

    def successors(self) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in self.preds]
        for g, ps in enumerate(self.preds):
            for p in ps:
                succ[p].append(g)
        return succ

    def topological_orders(self, limit: int | None = None):
        """Yield every topological order (exponential; for small oracles)."""
        n = len(self.preds)
        succ = self.successors()
        indeg = [len(p) for p in self.preds]
        order: list[int] = []
        emitted = 0

        def rec():
            nonlocal emitted
            if limit is not None and emitted >= limit:
                return
            if len(order) == n:
                emitted += 1
                yield tuple(order)
                return
            for g in range(n):
                if indeg[g] == 0 and g not in order_set:
                    order.append(g)
                    order_set.add(g)
                    for s in succ[g]:
                        indeg[s] -= 1
                    yield from rec()
                    for s in succ[g]:
                        indeg[s] += 1
                    order_set.discard(g)
                    order.pop()

        order_set: set[int] = set()
        yield from rec()


def build_dependencies(c: Circuit) -> DependencyDAG:
    last: dict[int, int] = {}
    preds = []
    for i, g in enumerate(c.gates):
        ps = sorted({last[q] for q in g.operands if q in last})
        preds.append(tuple(ps))
        for q in g.operands:
            last[q] = i
    return DependencyDAG(tuple(preds))
