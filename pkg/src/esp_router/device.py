"""Device (host graph) model, ESP arithmetic and most-reliable SWAP paths."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from .circuit import GateKind

# relative slack when comparing path costs / ESPs for ties
TIE_TOL = 1e-12


class DeviceError(ValueError):
    """Malformed or inconsistent device description."""


class AdjacencyError(ValueError):
    """A two-qubit gate was placed on qubits without a coupler."""


@dataclass(frozen=True)
class PhysQubit:
    id: int
    single_error: float = 0.0
    readout_error: float = 0.0


@dataclass(frozen=True)
class CouplingEdge:
    q0: int
    q1: int
    cx_error: float = 0.0


def _check_rate(value, what):
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0.0 <= value < 1.0:
        raise DeviceError(f"{what} must be a probability in [0, 1), got {value!r}")


@dataclass(frozen=True)
class DeviceModel:
    """Qubits, undirected couplers and their calibrated error rates.

    Qubit ids must be ``0..n-1``. Edges are stored with ``q0 < q1``.
    """

    name: str
    qubits: tuple[PhysQubit, ...]
    edges: tuple[CouplingEdge, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        qubits = tuple(sorted(self.qubits, key=lambda q: q.id))
        if [q.id for q in qubits] != list(range(len(qubits))):
            raise DeviceError("qubit ids must be unique and dense 0..n-1")
        for q in qubits:
            _check_rate(q.single_error, f"single_error of qubit {q.id}")
            _check_rate(q.readout_error, f"readout_error of qubit {q.id}")
        seen = set()
        edges = []
        for e in self.edges:
            a, b = sorted((e.q0, e.q1))
            if a == b:
                raise DeviceError(f"self-loop on qubit {a}")
            if a < 0 or b >= len(qubits):
                raise DeviceError(f"edge ({e.q0},{e.q1}) references a missing qubit")
            if (a, b) in seen:
                raise DeviceError(f"duplicate edge ({a},{b})")
            _check_rate(e.cx_error, f"cx_error of edge ({a},{b})")
            seen.add((a, b))
            edges.append(CouplingEdge(a, b, e.cx_error))
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "edges", tuple(sorted(edges, key=lambda e: (e.q0, e.q1))))
        if len(qubits) > 1 and len(self._components()) > 1:
            raise DeviceError(f"device {self.name!r} is not connected")

    def _components(self):
        seen, comps = set(), []
        for s in range(self.num_qubits):
            if s in seen:
                continue
            comp = set(bfs_distances(self.adjacency, s))
            seen |= comp
            comps.append(comp)
        return comps

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in self.qubits]
        for e in self.edges:
            nbrs[e.q0].append(e.q1)
            nbrs[e.q1].append(e.q0)
        return tuple(tuple(sorted(n)) for n in nbrs)

    @cached_property
    def cx_error(self) -> np.ndarray:
        """Symmetric matrix of CNOT error rates, NaN where no coupler."""
        m = np.full((self.num_qubits, self.num_qubits), np.nan)
        for e in self.edges:
            m[e.q0, e.q1] = m[e.q1, e.q0] = e.cx_error
        return m

    @cached_property
    def single_error(self) -> np.ndarray:
        return np.array([q.single_error for q in self.qubits])

    @cached_property
    def readout_error(self) -> np.ndarray:
        return np.array([q.readout_error for q in self.qubits])

    def has_edge(self, a: int, b: int) -> bool:
        return 0 <= a < self.num_qubits and 0 <= b < self.num_qubits and not np.isnan(self.cx_error[a, b])

    def swap_esp(self, a: int, b: int) -> float:
        """A SWAP is three CNOTs on the same coupler."""
        return (1.0 - self.cx_error[a, b]) ** 3

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "qubits": [{"id": q.id, "single_error": q.single_error, "readout_error": q.readout_error}
                       for q in self.qubits],
            "edges": [{"q0": e.q0, "q1": e.q1, "cx_error": e.cx_error} for e in self.edges],
        }
        if self.meta:
            doc["meta"] = self.meta
        return json.dumps(doc, indent=1) + "\n"

    def with_rates(self, single=None, readout=None, cx=None, name=None) -> "DeviceModel":
        """Copy with every rate of a class replaced by a constant."""
        qs = tuple(PhysQubit(q.id, q.single_error if single is None else single,
                             q.readout_error if readout is None else readout) for q in self.qubits)
        es = tuple(CouplingEdge(e.q0, e.q1, e.cx_error if cx is None else cx) for e in self.edges)
        return DeviceModel(name or self.name, qs, es)


def load_device(text: str) -> DeviceModel:
    """Parse the JSON device format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DeviceError(f"device file is not valid JSON: {e}") from None
    try:
        qubits = tuple(PhysQubit(int(q["id"]), q.get("single_error", 0.0), q.get("readout_error", 0.0))
                       for q in doc["qubits"])
        edges = tuple(CouplingEdge(int(e["q0"]), int(e["q1"]), e["cx_error"]) for e in doc["edges"])
    except (KeyError, TypeError) as e:
        raise DeviceError(f"device file missing field: {e}") from None
    return DeviceModel(str(doc.get("name", "device")), qubits, edges, doc.get("meta", {}))


def load_device_file(path) -> DeviceModel:
    return load_device(Path(path).read_text(encoding="utf-8"))


BUNDLED = ("tokyo", "tokyo_spread", "poughkeepsie", "poughkeepsie_spread")


def bundled_device(name: str) -> DeviceModel:
    """Load one of the shipped device files, e.g. ``"tokyo"`` or ``"tokyo_spread"``."""
    name = name.removesuffix(".device")
    if name not in BUNDLED:
        raise DeviceError(f"no bundled device {name!r}; choose from {BUNDLED}")
    return load_device(resources.files("esp_router.data").joinpath(f"{name}.device").read_text("utf-8"))


# ---------------------------------------------------------------- ESP


def esp_gate(d: DeviceModel, kind: GateKind, phys) -> float:
    """Success probability ``1 - eps`` of one placed gate."""
    if isinstance(phys, int):
        phys = (phys,)
    if kind is GateKind.CNOT:
        a, b = phys
        if not d.has_edge(a, b):
            raise AdjacencyError(f"no coupler between qubits {a} and {b} on {d.name}")
        return 1.0 - float(d.cx_error[a, b])
    (q,) = phys
    if not 0 <= q < d.num_qubits:
        raise AdjacencyError(f"qubit {q} not on device {d.name}")
    if kind is GateKind.MEASURE:
        return 1.0 - float(d.readout_error[q])
    return 1.0 - float(d.single_error[q])


def esp_circuit(d: DeviceModel, placed) -> float:
    """Product of gate ESPs; readout is charged once per measured qubit."""
    esp = 1.0
    measured = set()
    for kind, phys in placed:
        if kind is GateKind.MEASURE:
            q = phys if isinstance(phys, int) else phys[0]
            if q in measured:
                continue
            measured.add(q)
        esp *= esp_gate(d, kind, phys)
    return esp


# ---------------------------------------------------------------- paths


def bfs_distances(adjacency, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def eccentricity(d: DeviceModel, q: int) -> int:
    """Largest hop distance from ``q`` to any other qubit."""
    if not 0 <= q < d.num_qubits:
        raise DeviceError(f"qubit {q} not on device {d.name}")
    return max(bfs_distances(d.adjacency, q).values())


@dataclass(frozen=True, eq=False)
class PathTable:
    """Most reliable SWAP path between every pair of qubits.

    ``cost[u, v]`` is the summed ``-ln`` SWAP ESP of the chosen path,
    ``hops[u, v]`` its length and ``esp[u, v]`` the product of per-SWAP ESPs
    along ``paths[u][v]``.
    """

    cost: np.ndarray
    hops: np.ndarray
    esp: np.ndarray
    paths: tuple[tuple[tuple[int, ...], ...], ...]

    def path(self, u: int, v: int) -> tuple[int, ...]:
        return self.paths[u][v]

    def swaps(self, u: int, v: int) -> list[tuple[int, int]]:
        """SWAPs moving the content of ``u`` to ``v``, in execution order."""
        p = self.paths[u][v]
        return list(zip(p, p[1:]))


def path_esp(d: DeviceModel, path) -> float:
    esp = 1.0
    for a, b in zip(path, path[1:]):
        esp *= d.swap_esp(a, b)
    return esp


def all_pairs_best_paths(d: DeviceModel) -> PathTable:
    """Floyd-Warshall on ``-ln(ESP_swap)`` edge weights.

    Ties (within a relative 1e-12) go to fewer hops, then to the
    lexicographically smallest qubit sequence.
    """
    n = d.num_qubits
    w = np.full((n, n), np.inf)
    hops = np.full((n, n), np.iinfo(np.int64).max // 4, dtype=np.int64)
    np.fill_diagonal(w, 0.0)
    np.fill_diagonal(hops, 0)
    for e in d.edges:
        w[e.q0, e.q1] = w[e.q1, e.q0] = -3.0 * math.log1p(-e.cx_error)
        hops[e.q0, e.q1] = hops[e.q1, e.q0] = 1
    edge_w = w.copy()
    cost = w
    for k in range(n):
        cand = cost[:, k, None] + cost[None, k, :]
        cand_h = hops[:, k, None] + hops[None, k, :]
        tol = TIE_TOL * np.maximum(1.0, np.where(np.isfinite(cost), np.abs(cost), 0.0))
        better = cand < cost - tol
        with np.errstate(invalid="ignore"):  # inf - inf when both unreachable
            tie = (np.abs(cand - cost) <= tol) & (cand_h < hops)
        hops = np.where(better | tie, cand_h, hops)
        cost = np.where(better, cand, np.where(tie, np.minimum(cand, cost), cost))

    paths = []
    esp = np.ones((n, n))
    for u in range(n):
        row = []
        for v in range(n):
            p = _reconstruct(d, edge_w, cost, hops, u, v)
            row.append(p)
            esp[u, v] = path_esp(d, p)
        paths.append(tuple(row))
    return PathTable(cost, hops, esp, tuple(paths))


def _reconstruct(d, edge_w, cost, hops, u, v):
    path = [u]
    x = u
    while x != v:
        best = None
        for y in d.adjacency[x]:
            if y in path:
                continue
            tol = TIE_TOL * max(1.0, abs(cost[x, v]))
            if abs(edge_w[x, y] + cost[y, v] - cost[x, v]) <= tol:
                key = (hops[y, v], y)
                if best is None or key < best:
                    best = key
        if best is None:
            raise RuntimeError(f"path reconstruction failed for {u}->{v}")
        x = best[1]
        path.append(x)
    return tuple(path)


# ---------------------------------------------------------------- bundled calibrations

TOKYO_EDGES = (
    [(r * 5 + i, r * 5 + i + 1) for r in range(4) for i in range(4)]
    + [(i, i + 5) for i in range(15)]
    + [(1, 7), (2, 6), (3, 9), (4, 8), (5, 11), (6, 10),
       (7, 13), (8, 12), (11, 17), (12, 16), (13, 19), (14, 18)]
)

POUGHKEEPSIE_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (4, 9), (5, 6), (6, 7), (7, 8), (8, 9),
    (5, 10), (7, 12), (9, 14), (10, 11), (11, 12), (12, 13), (13, 14), (10, 15),
    (14, 19), (15, 16), (16, 17), (17, 18), (18, 19),
]

# (mean, best, worst). CNOT and single-qubit rows are published calibration
# summaries; readout is not published alongside them and is a stand-in.
CALIBRATION = {
    "tokyo": {"cx": (0.0284, 0.0147, 0.0712), "single": (0.00199, 0.00064, 0.00609),
              "readout": (0.05, 0.02, 0.12)},
    "poughkeepsie": {"cx": (0.0225, 0.0111, 0.0611), "single": (0.00107, 0.00052, 0.00277),
                     "readout": (0.05, 0.02, 0.12)},
}
TOPOLOGY = {"tokyo": TOKYO_EDGES, "poughkeepsie": POUGHKEEPSIE_EDGES}


def spread_values(rng: np.random.Generator, count: int, mean: float, best: float, worst: float):
    """``count`` values in ``[best, worst]`` hitting both bounds and ``mean`` exactly.

    Interior values are ``best + (worst - best) * u**k`` with ``u`` uniform and
    ``k`` found by bisection so the sample mean matches.
    """
    if count < 3:
        raise ValueError("need at least 3 values to pin best, worst and mean")
    u = rng.random(count - 2)
    lo_k, hi_k = 1e-3, 1e3

    def mean_for(k):
        inner = best + (worst - best) * u ** k
        return (inner.sum() + best + worst) / count

    if not mean_for(hi_k) <= mean <= mean_for(lo_k):
        raise ValueError("mean not reachable with these bounds")
    for _ in range(200):
        mid = math.sqrt(lo_k * hi_k)
        if mean_for(mid) > mean:
            lo_k = mid
        else:
            hi_k = mid
    inner = best + (worst - best) * u ** math.sqrt(lo_k * hi_k)
    vals = np.concatenate([[best, worst], inner])
    return [float(v) for v in vals[rng.permutation(count)]]


def calibrated_device(machine: str, spread_seed: int | None = None) -> DeviceModel:
    """Build a bundled device: every rate at its mean, or a seeded spread."""
    cal = CALIBRATION[machine]
    edges = TOPOLOGY[machine]
    n = 1 + max(max(e) for e in edges)
    if spread_seed is None:
        single = [cal["single"][0]] * n
        readout = [cal["readout"][0]] * n
        cx = [cal["cx"][0]] * len(edges)
        name = machine
    else:
        rng = np.random.default_rng(spread_seed)
        cx = spread_values(rng, len(edges), *cal["cx"])
        single = spread_values(rng, n, *cal["single"])
        readout = spread_values(rng, n, *cal["readout"])
        name = f"{machine}_spread"
    qubits = tuple(PhysQubit(i, single[i], readout[i]) for i in range(n))
    es = tuple(CouplingEdge(a, b, cx[i]) for i, (a, b) in enumerate(edges))
    meta = {"topology": machine, "variant": "mean" if spread_seed is None else "spread",
            "spread_seed": spread_seed}
    return DeviceModel(name, qubits, es, meta)


SPREAD_SEED = 20190101


def write_bundled(directory) -> None:
    directory = Path(directory)
    for machine in CALIBRATION:
        (directory / f"{machine}.device").write_text(calibrated_device(machine).to_json(), "utf-8")
        (directory / f"{machine}_spread.device").write_text(
            calibrated_device(machine, SPREAD_SEED).to_json(), "utf-8")
