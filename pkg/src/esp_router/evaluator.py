"""Noiseless and Pauli-noise simulation, KL scoring and the ESP-vs-KL experiment.

Outcomes are integers over the measured bits: bit ``i`` is the result of the
``i``-th measurement in program order. For the adder testbench that integer is
exactly the computed sum.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, GateKind
from .device import DeviceModel
from .mapper import CompiledCircuit
from .statevector import apply, apply_ops, zero_state

MEASURE = GateKind.MEASURE
MAX_QUBITS = 20
CHUNK_SHOTS = 4096
STATE_BUDGET = 1 << 22  # complex amplitudes held at once per chunk
PAULI_1Q = ("X", "Y", "Z")
# the 15 non-identity two-qubit Paulis as (first, second), None = identity
PAULI_2Q = tuple((a, b) for a in (None,) + PAULI_1Q for b in (None,) + PAULI_1Q
                 if (a, b) != (None, None))
ERROR_CLASSES = frozenset("GBS")


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class Distribution:
    """Probabilities over ``2**num_bits`` outcomes.

    Sampled distributions keep their raw ``counts`` and the number of
    trajectories that saw no error at all (``error_free``).
    """

    probs: np.ndarray
    num_bits: int
    shots: int = 0
    counts: np.ndarray | None = field(default=None, repr=False)
    error_free: int | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (1 << self.num_bits,):
            raise EvaluationError(f"expected {1 << self.num_bits} probabilities, got {p.shape}")
        if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise EvaluationError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    @classmethod
    def from_counts(cls, counts, num_bits: int, error_free: int | None = None) -> "Distribution":
        counts = np.asarray(counts, dtype=np.int64)
        shots = int(counts.sum())
        if shots <= 0:
            raise EvaluationError("no shots")
        return cls(counts / shots, num_bits, shots, counts, error_free)

    @property
    def size(self) -> int:
        return 1 << self.num_bits

    def as_dict(self, tol: float = 0.0) -> dict[int, float]:
        return {x: float(p) for x, p in enumerate(self.probs) if p > tol}

    def total_variation(self, other: "Distribution") -> float:
        _same_space(self, other)
        return 0.5 * float(np.abs(self.probs - other.probs).sum())

    def bitstring(self, x: int) -> str:
        """Measured bits of outcome ``x`` in measurement order."""
        return "".join(str((x >> i) & 1) for i in range(self.num_bits))


@dataclass(frozen=True)
class NoiseConfig:
    shots: int = 5000
    seed: int = 0
    classes: frozenset = ERROR_CLASSES

    def __post_init__(self):
        if self.shots < 1:
            raise EvaluationError("shots must be at least 1")
        bad = set(self.classes) - ERROR_CLASSES
        if bad:
            raise EvaluationError(f"unknown error classes {sorted(bad)}")


@dataclass(frozen=True)
class ExperimentRecord:
    circuit_id: str
    compiler: str
    esp: float
    kl_median: float
    kl_min: float
    kl_max: float
    shots: int
    runs: int

    def tsv(self) -> str:
        return (f"{self.circuit_id}\t{self.compiler}\t{self.esp:.6g}\t"
                f"{self.kl_median:.6g}\t{self.kl_min:.6g}\t{self.kl_max:.6g}")


# ---------------------------------------------------------------- preparation


@dataclass(frozen=True)
class _Program:
    n: int
    ops: list  # (kind, local operands, physical operands)
    measured: list  # local qubit per measured bit, in order
    measured_phys: list


def _program(c) -> _Program:
    if isinstance(c, CompiledCircuit):
        c = c.to_circuit()
    if not isinstance(c, Circuit):
        raise TypeError("expected a Circuit or CompiledCircuit")
    touched = sorted({q for g in c.gates for q in g.operands})
    if len(touched) > MAX_QUBITS:
        raise EvaluationError(f"{len(touched)} touched qubits exceeds {MAX_QUBITS}")
    local = {q: i for i, q in enumerate(touched)}
    ops, measured, phys = [], [], []
    for g in c.gates:
        if g.kind is MEASURE:
            measured.append(local[g.operands[0]])
            phys.append(g.operands[0])
        else:
            ops.append((g.kind, tuple(local[q] for q in g.operands), g.operands))
    if not measured:
        raise EvaluationError("circuit has no measurements")
    return _Program(len(touched), ops, measured, phys)


def _outcome_index(n: int, measured: list[int]) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(idx)
    for i, q in enumerate(measured):
        out |= ((idx >> q) & 1) << i
    return out


def _final_state(prog: _Program) -> np.ndarray:
    return apply_ops(zero_state(prog.n), [(k, q) for k, q, _ in prog.ops], prog.n)[0]


def ideal_distribution(c) -> Distribution:
    """Exact Born distribution over the measured bits."""
    prog = _program(c)
    psi = _final_state(prog)
    k = len(prog.measured)
    probs = np.bincount(_outcome_index(prog.n, prog.measured), weights=np.abs(psi) ** 2,
                        minlength=1 << k)
    return Distribution(probs / probs.sum(), k)


# ---------------------------------------------------------------- noise


def _gate_rates(prog: _Program, d: DeviceModel, classes) -> np.ndarray:
    rates = np.zeros(len(prog.ops))
    for i, (kind, _, phys) in enumerate(prog.ops):
        if kind is GateKind.CNOT:
            if not d.has_edge(*phys):
                raise EvaluationError(f"CNOT on {phys} is not a coupler of {d.name}")
            if "B" in classes:
                rates[i] = d.cx_error[phys]
        elif "G" in classes:
            rates[i] = d.single_error[phys[0]]
    return rates


def _sample_rows(cum: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(cum.shape[0]) * cum[:, -1]
    return np.minimum((cum < u[:, None]).sum(axis=1), cum.shape[1] - 1)


def _run_chunk(prog, rates, readout, ideal_cum, out_index, shots, seq) -> tuple[np.ndarray, int]:
    rng = np.random.default_rng(seq)
    n, k = prog.n, len(prog.measured)
    hit = rng.random((shots, len(prog.ops))) < rates
    flips = rng.random((shots, k)) < readout
    noisy = np.nonzero(hit.any(axis=1))[0]
    clean = np.setdiff1d(np.arange(shots), noisy)
    basis = np.empty(shots, dtype=np.int64)
    u = rng.random(len(clean)) * ideal_cum[-1]
    basis[clean] = np.minimum(np.searchsorted(ideal_cum, u, side="left"), ideal_cum.size - 1)
    kinds = rng.integers(0, 15, size=(shots, len(prog.ops)))  # Pauli index per potential error
    batch = max(1, STATE_BUDGET >> n)
    for start in range(0, len(noisy), batch):
        rows = noisy[start:start + batch]
        states = zero_state(n, len(rows))
        for j, (kind, ops, _) in enumerate(prog.ops):
            states = apply(states, kind, ops, n)
            err = np.nonzero(hit[rows, j])[0]
            if not len(err):
                continue
            if len(ops) == 1:
                choice = kinds[rows[err], j] % 3
                for p in range(3):
                    sel = err[choice == p]
                    if len(sel):
                        states[sel] = apply(states[sel], PAULI_1Q[p], ops, n)
            else:
                choice = kinds[rows[err], j]
                for p, pair in enumerate(PAULI_2Q):
                    sel = err[choice == p]
                    if not len(sel):
                        continue
                    sub = states[sel]
                    for name, q in zip(pair, ops):
                        if name is not None:
                            sub = apply(sub, name, (q,), n)
                    states[sel] = sub
        probs = np.abs(states) ** 2
        basis[rows] = _sample_rows(np.cumsum(probs, axis=1), rng)
    outcomes = out_index[basis]
    bits = np.zeros(shots, dtype=np.int64)
    for i in range(k):
        bits |= (flips[:, i].astype(np.int64)) << i
    outcomes ^= bits
    error_free = int(np.count_nonzero(~(hit.any(axis=1) | flips.any(axis=1))))
    return np.bincount(outcomes, minlength=1 << k), error_free


def noisy_sample(c, d: DeviceModel, nc: NoiseConfig, threads: int = 1) -> Distribution:
    """Monte-Carlo Pauli trajectories.

    After each gate, with its error rate, a uniformly random non-identity
    Pauli hits the gate's qubits; each measured bit flips with its qubit's
    readout error. Shots are split into fixed chunks with their own seed
    streams, so the result does not depend on ``threads``.
    """
    prog = _program(c)
    rates = _gate_rates(prog, d, nc.classes)
    readout = np.zeros(len(prog.measured))
    if "S" in nc.classes:
        readout = np.array([d.readout_error[q] for q in prog.measured_phys])
    ideal_cum = np.cumsum(np.abs(_final_state(prog)) ** 2)
    out_index = _outcome_index(prog.n, prog.measured)
    sizes = [min(CHUNK_SHOTS, nc.shots - s) for s in range(0, nc.shots, CHUNK_SHOTS)]
    seqs = np.random.SeedSequence(nc.seed).spawn(len(sizes))
    job = lambda i: _run_chunk(prog, rates, readout, ideal_cum, out_index, sizes[i], seqs[i])
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    counts = sum(p[0] for p in parts)
    return Distribution.from_counts(counts, len(prog.measured), sum(p[1] for p in parts))


# ---------------------------------------------------------------- KL


def _same_space(p: Distribution, q: Distribution):
    if p.num_bits != q.num_bits:
        raise EvaluationError(f"outcome spaces differ: {p.num_bits} vs {q.num_bits} bits")


def kl_divergence(ideal: Distribution, empirical: Distribution, alpha: float = 1.0) -> float:
    """``sum p ln(p / q)`` in nats.

    A sampled ``empirical`` is Laplace-smoothed, ``q = (counts + alpha) /
    (shots + alpha K)``; ``alpha=0`` or an unsampled distribution uses the
    probabilities as they are (and may give ``inf``).
    """
    _same_space(ideal, empirical)
    if alpha < 0:
        raise EvaluationError("alpha must be non-negative")
    p = ideal.probs
    if alpha > 0 and empirical.shots > 0:
        counts = empirical.counts if empirical.counts is not None else empirical.probs * empirical.shots
        q = (counts + alpha) / (empirical.shots + alpha * empirical.size)
    else:
        q = empirical.probs
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    return max(0.0, float(np.sum(p[mask] * np.log(p[mask] / q[mask]))))


# ---------------------------------------------------------------- experiment


def pearson(xs, ys) -> float | None:
    """Correlation coefficient, or None when either side has no spread."""
    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def run_experiment(circuits, d: DeviceModel, runs: int = 5, shots: int = 5000, seed: int = 0,
                   threads: int = 1, alpha: float = 1.0):
    """Evaluate ``(circuit_id, compiler, CompiledCircuit)`` triples.

    Each gets ``runs`` independent noisy samples; returns the records and
    the Pearson correlation between ESP and median KL (None if undefined).
    """
    if runs < 1:
        raise EvaluationError("runs must be at least 1")
    if shots < 1:
        raise EvaluationError("shots must be at least 1")
    records = []
    for i, (cid, tag, comp) in enumerate(circuits):
        ideal = ideal_distribution(comp)
        kls = []
        for r in range(runs):
            run_seed = int(np.random.SeedSequence([seed, i, r]).generate_state(1)[0])
            emp = noisy_sample(comp, d, NoiseConfig(shots, run_seed), threads)
            kls.append(kl_divergence(ideal, emp, alpha))
        records.append(ExperimentRecord(cid, tag, comp.esp, float(np.median(kls)),
                                        min(kls), max(kls), shots, runs))
    corr = pearson([r.esp for r in records], [r.kl_median for r in records])
    return records, corr


def format_records(records, corr) -> str:
    lines = [r.tsv() for r in records]
    lines.append(f"correlation\t{'undefined' if corr is None else f'{corr:.6g}'}")
    return "\n".join(lines) + "\n"


def write_distribution_csv(dist: Distribution, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["outcome", "probability"])
        for x, p in enumerate(dist.probs):
            w.writerow([x, repr(float(p))])


# ---------------------------------------------------------------- remote CNOT success


def template_success_rate(d: DeviceModel, gate_seq, shots: int, seed: int = 0,
                          mode: str = "error_free") -> float:
    """Fraction of successful shots of a remote-CNOT realization.

    ``error_free`` counts trajectories without any gate error (the event whose
    probability is the ESP). ``output`` prepares the control in ``|1>``,
    measures every touched qubit with readout noise, and counts shots that
    match the noiseless outcome.
    """
    qubits = sorted({q for _, qs in gate_seq for q in qs})
    ops = list(gate_seq)
    if mode == "output":
        ops = [(GateKind.X, (gate_seq[0][1][0],))] + ops
        classes = ERROR_CLASSES
    elif mode == "error_free":
        classes = frozenset("GB")
    else:
        raise EvaluationError(f"unknown success mode {mode!r}")
    from .circuit import Gate
    gates = [Gate(k, qs) for k, qs in ops] + [Gate(MEASURE, (q,)) for q in qubits]
    circ = Circuit(d.num_qubits, tuple(gates))
    dist = noisy_sample(circ, d, NoiseConfig(shots, seed, classes))
    if mode == "error_free":
        return dist.error_free / shots
    ideal = ideal_distribution(circ)
    return float(dist.counts[int(np.argmax(ideal.probs))]) / shots
