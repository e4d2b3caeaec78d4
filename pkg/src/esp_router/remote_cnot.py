"""Realizations of a CNOT between qubits that share no coupler.

For a two-hop path ``c - m - t`` seven equivalent circuits are built:

* ``B``, ``D``: four-CNOT bridges (two orderings), valid on every input;
* ``C``: three-CNOT bridge, valid only while ``m`` holds ``|0>``;
* ``E``/``F``: SWAP(m, t) in either CNOT orientation, then CNOT(c, m);
* ``G``/``H``: SWAP(c, m) in either CNOT orientation, then CNOT(m, t).

E-H relocate qubits. Longer paths get recursive bridges (``bridge-B``,
``bridge-D``, ``bridge-C``) and one SWAP-to-meet realization per edge of the
path (``swap-meet-j``: control walks to ``p[j]``, target to ``p[j+1]``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import GateKind
from .device import DeviceModel, esp_circuit
from .statevector import ops_unitary

CX = GateKind.CNOT
FULL = "full"
ANCILLA_ZERO = "ancilla-zero"
MAX_HOPS = 4


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class RemoteCnotTemplate:
    """A gate sequence realizing CNOT(path[0] -> path[-1]) over a device path.

    ``relocates`` maps a physical qubit to where its content ends up; qubits
    not listed stay put.
    """

    name: str
    path: tuple[int, ...]
    gate_seq: tuple[tuple[GateKind, tuple[int, ...]], ...]
    relocates: dict = field(default_factory=dict, compare=False)
    equivalence_domain: str = FULL

    @property
    def hop_count(self) -> int:
        return len(self.path) - 1

    @property
    def control(self) -> int:
        return self.path[0]

    @property
    def target(self) -> int:
        return self.path[-1]

    def final_position(self, q: int) -> int:
        return self.relocates.get(q, q)

    @property
    def num_cnots(self) -> int:
        return sum(k is CX for k, _ in self.gate_seq)


@dataclass(frozen=True)
class Candidate:
    path: tuple[int, ...]
    template: RemoteCnotTemplate
    esp: float

    @property
    def name(self) -> str:
        return self.template.name


@dataclass(frozen=True)
class CandidateSet:
    control: int
    target: int
    candidates: tuple[Candidate, ...]

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)


def _cx(a, b):
    return (CX, (a, b))


def _swap(a, b, flip=False):
    """Three-CNOT SWAP; ``flip`` selects the other CNOT orientation."""
    if flip:
        a, b = b, a
    return [_cx(a, b), _cx(b, a), _cx(a, b)]


def _bridge_b(p):
    if len(p) == 2:
        return [_cx(*p)]
    inner = _bridge_b(p[:-1])
    last = _cx(p[-2], p[-1])
    return inner + [last] + inner + [last]


def _bridge_d(p):
    if len(p) == 2:
        return [_cx(*p)]
    inner = _bridge_d(p[:-1])
    last = _cx(p[-2], p[-1])
    return [last] + inner + [last] + inner


def _bridge_c(p):
    up = [_cx(a, b) for a, b in zip(p, p[1:])]
    return up + up[-2::-1]


def _swap_meet(p, j, flip=False):
    """Move control to p[j] and target to p[j+1], then CNOT across that edge."""
    k = len(p) - 1
    seq = []
    reloc = {}
    for i in range(j):
        seq += _swap(p[i], p[i + 1], flip)
    for i in range(k, j + 1, -1):
        seq += _swap(p[i], p[i - 1], flip)
    seq.append(_cx(p[j], p[j + 1]))
    if j > 0:
        reloc[p[0]] = p[j]
        for i in range(1, j + 1):
            reloc[p[i]] = p[i - 1]
    if j + 1 < k:
        reloc[p[k]] = p[j + 1]
        for i in range(j + 1, k):
            reloc[p[i]] = p[i + 1]
    return seq, reloc


def templates_for_path(path) -> list[RemoteCnotTemplate]:
    """Every shipped realization of CNOT(path[0] -> path[-1]) along ``path``."""
    p = tuple(path)
    k = len(p) - 1
    if not 1 <= k <= MAX_HOPS:
        raise TemplateError(f"path must have 1..{MAX_HOPS} hops, got {k}")
    if len(set(p)) != len(p):
        raise TemplateError(f"path {p} revisits a qubit")
    if k == 1:
        return [RemoteCnotTemplate("direct", p, (_cx(*p),))]
    if k == 2:
        c, m, t = p
        e_seq, e_rel = _swap_meet(p, 0)
        f_seq, _ = _swap_meet(p, 0, flip=True)
        g_seq, g_rel = _swap_meet(p, 1)
        h_seq, _ = _swap_meet(p, 1, flip=True)
        return [
            RemoteCnotTemplate("B", p, tuple(_bridge_b(p))),
            RemoteCnotTemplate("C", p, tuple(_bridge_c(p)), equivalence_domain=ANCILLA_ZERO),
            RemoteCnotTemplate("D", p, tuple(_bridge_d(p))),
            RemoteCnotTemplate("E", p, tuple(e_seq), e_rel),
            RemoteCnotTemplate("F", p, tuple(f_seq), e_rel),
            RemoteCnotTemplate("G", p, tuple(g_seq), g_rel),
            RemoteCnotTemplate("H", p, tuple(h_seq), g_rel),
        ]
    out = [
        RemoteCnotTemplate("bridge-B", p, tuple(_bridge_b(p))),
        RemoteCnotTemplate("bridge-C", p, tuple(_bridge_c(p)), equivalence_domain=ANCILLA_ZERO),
        RemoteCnotTemplate("bridge-D", p, tuple(_bridge_d(p))),
    ]
    for j in range(k):
        seq, rel = _swap_meet(p, j)
        out.append(RemoteCnotTemplate(f"swap-meet-{j}", p, tuple(seq), rel))
    return out


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class VerificationResult:
    name: str
    passed: bool
    max_deviation: float
    domain: str

    def __str__(self):
        verdict = "pass" if self.passed else "FAIL"
        return f"{self.name}: {verdict} on {self.domain} domain (max deviation {self.max_deviation:.3g})"


def _relocation_matrix(n: int, final: list[int]) -> np.ndarray:
    """Permutation sending the content of local qubit i to local qubit final[i]."""
    dim = 1 << n
    P = np.zeros((dim, dim))
    for x in range(dim):
        y = 0
        for i in range(n):
            y |= ((x >> i) & 1) << final[i]
        P[y, x] = 1.0
    return P


def verify_template(t: RemoteCnotTemplate, domain: str | None = None, tol: float = 1e-10) -> VerificationResult:
    """Compare the template's unitary, relocation undone, against CNOT.

    ``domain`` defaults to the template's declared equivalence domain.
    """
    domain = domain or t.equivalence_domain
    if t.hop_count > MAX_HOPS:
        raise TemplateError(f"{t.name}: at most {MAX_HOPS} hops can be verified")
    local = {q: i for i, q in enumerate(t.path)}
    n = len(t.path)
    try:
        ops = [(k, tuple(local[q] for q in qs)) for k, qs in t.gate_seq]
    except KeyError as e:
        raise TemplateError(f"{t.name}: gate on qubit {e.args[0]} outside the path") from None
    U = ops_unitary(ops, n)
    final = [local[t.final_position(q)] for q in t.path]
    want = _relocation_matrix(n, final) @ ops_unitary([(CX, (0, n - 1))], n)
    cols = np.arange(1 << n)
    if domain == ANCILLA_ZERO:
        interior = sum(1 << i for i in range(1, n - 1))
        cols = cols[(cols & interior) == 0]
    elif domain != FULL:
        raise TemplateError(f"unknown domain {domain!r}")
    dev = float(np.max(np.abs(U[:, cols] - want[:, cols])))
    return VerificationResult(t.name, dev <= tol, dev, domain)


# ---------------------------------------------------------------- candidates


def enumerate_paths(d: DeviceModel, u: int, v: int, max_hops: int = MAX_HOPS) -> list[tuple[int, ...]]:
    """All simple paths from u to v with at most ``max_hops`` edges, shortest first."""
    if not 1 <= max_hops <= MAX_HOPS:
        raise ValueError(f"max_hops must be in 1..{MAX_HOPS}")
    if u == v:
        return []
    found = []
    stack = [(u,)]
    while stack:
        p = stack.pop()
        for w in d.adjacency[p[-1]]:
            if w in p:
                continue
            if w == v:
                found.append(p + (w,))
            elif len(p) < max_hops:
                stack.append(p + (w,))
    return sorted(found, key=lambda p: (len(p), p))


def instantiate_candidates(d: DeviceModel, path, domains=(FULL, ANCILLA_ZERO)) -> list[Candidate]:
    """Templates along ``path`` scored by ESP, best first."""
    path = tuple(path)
    for a, b in zip(path, path[1:]):
        if not d.has_edge(a, b):
            raise TemplateError(f"path {path} uses missing coupler ({a},{b})")
    cands = [Candidate(path, t, esp_circuit(d, t.gate_seq))
             for t in templates_for_path(path) if t.equivalence_domain in domains]
    return sorted(cands, key=_rank_key)


def _rank_key(c: Candidate):
    return (-c.esp, c.name, c.path)


def candidate_set(d: DeviceModel, control: int, target: int, max_hops: int = MAX_HOPS,
                  domains=(FULL, ANCILLA_ZERO)) -> CandidateSet:
    cands = []
    for p in enumerate_paths(d, control, target, max_hops):
        cands += instantiate_candidates(d, p, domains)
    return CandidateSet(control, target, tuple(sorted(cands, key=_rank_key)))


def select_best(cs) -> Candidate:
    """Highest-ESP candidate; ties go to the alphabetically first name."""
    cands = list(cs)
    if not cands:
        raise ValueError("no candidates to select from")
    return min(cands, key=_rank_key)


def format_table(cs: CandidateSet) -> str:
    lines = [f"{'rank':>4}  {'name':<12} {'path':<22} {'gates':>5}  esp"]
    for i, c in enumerate(cs, 1):
        path = "-".join(map(str, c.path))
        lines.append(f"{i:>4}  {c.name:<12} {path:<22} {len(c.template.gate_seq):>5}  {c.esp:.6f}")
    return "\n".join(lines)
