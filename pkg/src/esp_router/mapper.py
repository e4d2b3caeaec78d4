"""ESP-maximizing placement and routing by beam search.

A search state is (per-variable progress through its gate list, mapping).
Each step executes one dependency-ready CNOT, routed through the best
"meeting edge" for its operands. One-qubit gates are emitted as soon as they
become ready and measurements are appended at the end, at each variable's
final location.
"""
from __future__ import annotations

import json
import math
import time
import weakref
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .device import TIE_TOL, DeviceModel, PathTable, all_pairs_best_paths, esp_circuit
from .selection import smallest_k
from .statevector import apply_ops, unitary_of

CX = GateKind.CNOT
MEASURE = GateKind.MEASURE


class MappingError(ValueError):
    pass


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class CompilerConfig:
    beam_width: int = 10000
    random_mappings: int = 1000
    seed: int = 0
    use_gce: bool = True

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.random_mappings < 0:
            raise ValueError("random_mappings must be >= 0")


@dataclass(frozen=True)
class CompiledCircuit:
    """A routed circuit over physical qubits.

    ``initial_mapping[v]`` / ``final_mapping[v]`` give the physical qubit of
    variable ``v`` before the first and after the last gate.
    """

    gates: tuple[Gate, ...]
    esp: float
    initial_mapping: tuple[int, ...]
    final_mapping: tuple[int, ...]
    num_qubits: int
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def to_circuit(self) -> Circuit:
        return Circuit(self.num_qubits, self.gates)

    def placed(self):
        return [(g.kind, g.operands) for g in self.gates]

    def report(self, **extra) -> dict:
        doc = {
            "initial_mapping": list(self.initial_mapping),
            "final_mapping": list(self.final_mapping),
            "esp": self.esp,
            "gate_count": self.gate_count,
        }
        doc.update(extra)
        return doc


# ---------------------------------------------------------------- mappings


def _check_fits(c: Circuit, d: DeviceModel):
    if c.num_vars > d.num_qubits:
        raise MappingError(f"{c.num_vars} variables do not fit on {d.num_qubits} qubits")


def _check_mapping(c: Circuit, d: DeviceModel, m) -> tuple[int, ...]:
    m = tuple(int(q) for q in m)
    if len(m) != c.num_vars or len(set(m)) != len(m) or not all(0 <= q < d.num_qubits for q in m):
        raise MappingError(f"invalid mapping {m} for {c.num_vars} variables on {d.num_qubits} qubits")
    return m


def random_mapping(c: Circuit, d: DeviceModel, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniformly random injective placement."""
    _check_fits(c, d)
    return tuple(int(q) for q in rng.permutation(d.num_qubits)[:c.num_vars])


def guest_graph(c: Circuit) -> dict[tuple[int, int], int]:
    """CNOT count per unordered variable pair."""
    w: dict[tuple[int, int], int] = {}
    for g in c.gates:
        if g.kind is CX:
            key = tuple(sorted(g.operands))
            w[key] = w.get(key, 0) + 1
    return w


def gce_initial_mapping(c: Circuit, d: DeviceModel, rng: np.random.Generator) -> tuple[int, ...]:
    """Greatest-connecting-edge placement.

    The heaviest guest edge goes onto the lowest-error coupler, then the
    heaviest edge from a placed to an unplaced variable puts the unplaced one
    on the lowest-error free neighbour. Edges with no free neighbour are
    skipped. Leftover variables land on random free qubits.
    """
    _check_fits(c, d)
    weights = guest_graph(c)
    edges = sorted(weights, key=lambda e: (-weights[e], e))
    degree = [0] * c.num_vars
    for (a, b), w in weights.items():
        degree[a] += w
        degree[b] += w
    cx = d.cx_error
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def seed_edge(v1, v2):
        free = [e for e in d.edges if e.q0 not in used and e.q1 not in used]
        if not free:
            return False
        e = min(free, key=lambda e: (e.cx_error, e.q0, e.q1))
        q_hi, q_lo = e.q0, e.q1
        free_deg = lambda q: sum(n not in used for n in d.adjacency[q])
        if (free_deg(q_lo), -q_lo) > (free_deg(q_hi), -q_hi):
            q_hi, q_lo = q_lo, q_hi
        # better-connected endpoint to the heavier variable
        if (degree[v2], -v2) > (degree[v1], -v1):
            v1, v2 = v2, v1
        mapping[v1], mapping[v2] = q_hi, q_lo
        used.update((q_hi, q_lo))
        return True

    remaining = list(edges)
    while remaining:
        connecting = [e for e in remaining if (e[0] in mapping) != (e[1] in mapping)]
        if connecting:
            e = connecting[0]
            remaining.remove(e)
            v, v2 = e if e[0] in mapping else (e[1], e[0])
            nbrs = [q for q in d.adjacency[mapping[v]] if q not in used]
            if nbrs:
                q = min(nbrs, key=lambda q: (cx[mapping[v], q], q))
                mapping[v2] = q
                used.add(q)
            continue
        fresh = [e for e in remaining if e[0] not in mapping and e[1] not in mapping]
        if not fresh:
            break
        # new guest component: start it on the best free coupler
        e = fresh[0]
        remaining.remove(e)
        seed_edge(*e)
        remaining = [r for r in remaining if not (r[0] in mapping and r[1] in mapping)]

    free = [q for q in range(d.num_qubits) if q not in used]
    order = rng.permutation(len(free))
    k = 0
    for v in range(c.num_vars):
        if v not in mapping:
            mapping[v] = free[order[k]]
            k += 1
    return tuple(int(mapping[v]) for v in range(c.num_vars))


# ---------------------------------------------------------------- best swap


@dataclass(frozen=True)
class SwapPlan:
    """Route CNOT(control at ``source[0]``, target at ``source[1]``).

    ``swaps`` run in order (control's walk first), after which the control
    sits on ``meet[0]`` and the target on ``meet[1]``.
    """

    source: tuple[int, int]
    swaps: tuple[tuple[int, int], ...]
    meet: tuple[int, int]
    swap_esp: float
    cnot_esp: float
    moves: tuple[tuple[int, int], ...]  # (from, to) for every relocated qubit content

    @property
    def esp(self) -> float:
        return self.swap_esp * self.cnot_esp


def _better(esp, nswaps, meet, best) -> bool:
    if best is None:
        return True
    b_esp, b_n, b_meet = best
    tol = TIE_TOL * max(esp, b_esp)
    if esp > b_esp + tol:
        return True
    if esp < b_esp - tol:
        return False
    return (nswaps, meet) < (b_n, b_meet)


def _relocation(swaps) -> tuple[tuple[int, int], ...]:
    where: dict[int, int] = {}  # physical position -> origin of its content
    for a, b in swaps:
        where[a], where[b] = where.get(b, b), where.get(a, a)
    return tuple(sorted((src, dst) for dst, src in where.items() if src != dst))


class SwapPlanner:
    """Cached meeting-edge search over a device and its path table."""

    def __init__(self, d: DeviceModel, pt: PathTable):
        self.d = d
        self.pt = pt
        self._cache: dict[tuple[int, int], SwapPlan] = {}

    def plan(self, pc: int, ptg: int) -> SwapPlan:
        key = (pc, ptg)
        plan = self._cache.get(key)
        if plan is None:
            plan = self._cache[key] = self._search(pc, ptg)
        return plan

    def _search(self, pc: int, ptg: int) -> SwapPlan:
        if pc == ptg:
            raise MappingError("CNOT operands share a qubit")
        pt, cx = self.pt, self.d.cx_error
        best = None
        choice = None
        for e in self.d.edges:
            for q0, q1 in ((e.q0, e.q1), (e.q1, e.q0)):
                path_c, path_t = pt.path(pc, q0), pt.path(ptg, q1)
                # control walks first; it must not drag the target along,
                # and the target must not then displace the control
                if ptg in path_c or q0 in path_t:
                    continue
                esp = pt.esp[pc, q0] * pt.esp[ptg, q1] * (1.0 - cx[q0, q1])
                n = len(path_c) + len(path_t) - 2
                if _better(esp, n, (q0, q1), best):
                    best = (esp, n, (q0, q1))
                    choice = (path_c, path_t, q0, q1)
        if choice is None:
            raise MappingError(f"no route for CNOT between qubits {pc} and {ptg}")
        path_c, path_t, q0, q1 = choice
        swaps = tuple(zip(path_c, path_c[1:])) + tuple(zip(path_t, path_t[1:]))
        return SwapPlan((pc, ptg), swaps, (q0, q1), float(pt.esp[pc, q0] * pt.esp[ptg, q1]),
                        1.0 - float(cx[q0, q1]), _relocation(swaps))


_planners: "weakref.WeakKeyDictionary[PathTable, SwapPlanner]" = weakref.WeakKeyDictionary()


def _planner(pt: PathTable, d: DeviceModel) -> SwapPlanner:
    p = _planners.get(pt)
    if p is None or p.d is not d:
        p = _planners[pt] = SwapPlanner(d, pt)
    return p


def best_swap(pt: PathTable, d: DeviceModel, mapping, g: Gate):
    """SWAPs and meeting edge for gate ``g`` under ``mapping``.

    Returns ``([], None)`` for one-qubit gates.
    """
    if g.kind is not CX:
        return [], None
    plan = _planner(pt, d).plan(mapping[g.operands[0]], mapping[g.operands[1]])
    return list(plan.swaps), plan.meet


def swap_ops(swaps) -> list[tuple[GateKind, tuple[int, int]]]:
    ops = []
    for a, b in swaps:
        ops += [(CX, (a, b)), (CX, (b, a)), (CX, (a, b))]
    return ops


# ---------------------------------------------------------------- scoring


@dataclass(frozen=True)
class SearchState:
    """Executed gate ids, placement, accumulated ESP and lookahead score.

    The compiler itself keeps states in a compact tuple form; this is the
    readable view used by :func:`update_score`.
    """

    executed: frozenset
    mapping: tuple[int, ...]
    esp: float = 1.0
    score: float = 0.0


def update_score(s: SearchState, c: Circuit, pt: PathTable, d: DeviceModel) -> float:
    """``esp`` times the imagined ESP of every unexecuted gate under the current mapping."""
    planner = _planner(pt, d)
    score = s.esp
    for g in c.gates:
        if g.seq in s.executed:
            continue
        if g.kind is CX:
            score *= planner.plan(s.mapping[g.operands[0]], s.mapping[g.operands[1]]).esp
        elif g.kind is MEASURE:
            score *= 1.0 - d.readout_error[s.mapping[g.operands[0]]]
        else:
            score *= 1.0 - d.single_error[s.mapping[g.operands[0]]]
    return float(score)


class _Problem:
    """Per-compile tables shared by every search state."""

    def __init__(self, c: Circuit, d: DeviceModel, pt: PathTable | None):
        self.c, self.d = c, d
        self.pt = pt if pt is not None else all_pairs_best_paths(d)
        self.planner = _planner(self.pt, d)
        self.nq = d.num_qubits
        with np.errstate(divide="ignore"):
            self.log_single = np.log1p(-d.single_error)
            self.log_readout = np.log1p(-d.readout_error)
        self.log_cx = np.log1p(-np.nan_to_num(d.cx_error, nan=0.0))

        V = c.num_vars
        self.var_gates: list[list[Gate]] = [[] for _ in range(V)]
        slot = {}
        for g in c.gates:
            for v in g.operands:
                slot[(g.seq, v)] = len(self.var_gates[v])
                self.var_gates[v].append(g)
        self.measures = [g for g in c.gates if g.kind is MEASURE]
        self.n_cnot = c.num_cnots

        # columns for vectorized scoring
        gv = np.array([g.operands[0] for g in c.gates], dtype=np.int64)
        self.gate_var = gv
        self.gate_slot = np.array([slot[(g.seq, g.operands[0])] for g in c.gates], dtype=np.int64)
        kinds = [g.kind for g in c.gates]
        self.cx_cols = np.array([i for i, k in enumerate(kinds) if k is CX], dtype=np.int64)
        self.cx_ctrl = gv[self.cx_cols] if len(self.cx_cols) else gv[:0]
        self.cx_tgt = np.array([c.gates[i].operands[1] for i in self.cx_cols], dtype=np.int64)
        self.one_cols = np.array([i for i, k in enumerate(kinds) if k.is_single], dtype=np.int64)
        self.m_cols = np.array([i for i, k in enumerate(kinds) if k is MEASURE], dtype=np.int64)
        self._pair_log = None

    @property
    def pair_log(self) -> np.ndarray:
        if self._pair_log is None:
            m = np.zeros((self.nq, self.nq))
            for a in range(self.nq):
                for b in range(self.nq):
                    if a != b:
                        m[a, b] = math.log(self.planner.plan(a, b).esp)
            self._pair_log = m
        return self._pair_log

    def log_scores(self, log_esp: np.ndarray, pos: np.ndarray, maps: np.ndarray):
        """Vectorized lookahead: returns (log scores, unexecuted gate counts)."""
        pending = pos[:, self.gate_var] <= self.gate_slot
        terms = np.zeros(pending.shape)
        if len(self.cx_cols):
            terms[:, self.cx_cols] = self.pair_log[maps[:, self.cx_ctrl], maps[:, self.cx_tgt]]
        if len(self.one_cols):
            terms[:, self.one_cols] = self.log_single[maps[:, self.gate_var[self.one_cols]]]
        if len(self.m_cols):
            terms[:, self.m_cols] = self.log_readout[maps[:, self.gate_var[self.m_cols]]]
        return log_esp + np.where(pending, terms, 0.0).sum(axis=1), pending.sum(axis=1)

    # -- state transitions; a node is (pos, mapping, log_esp, trace, ngates)

    def cascade(self, pos: list, mapping, vars_):
        """Emit ready one-qubit gates on ``vars_``; returns (ops, log esp)."""
        ops = []
        logp = 0.0
        for v in vars_:
            gl = self.var_gates[v]
            while pos[v] < len(gl) and gl[pos[v]].kind.is_single:
                q = mapping[v]
                ops.append((gl[pos[v]].kind, (q,)))
                logp += self.log_single[q]
                pos[v] += 1
        return ops, logp

    def initial_node(self, mapping):
        pos = [0] * self.c.num_vars
        ops, logp = self.cascade(pos, mapping, range(self.c.num_vars))
        return (tuple(pos), tuple(mapping), logp, (None, tuple(ops)), len(ops))

    def ready(self, pos, mapping=None):
        out = []
        for v, gl in enumerate(self.var_gates):
            if pos[v] < len(gl):
                g = gl[pos[v]]
                if g.kind is CX and g.operands[0] == v:
                    t = g.operands[1]
                    if pos[t] < len(self.var_gates[t]) and self.var_gates[t][pos[t]] is g:
                        out.append(g)
        return out

    def expand(self, node, g: Gate):
        pos, mapping, logp, trace, ngates = node
        cv, tv = g.operands
        plan = self.planner.plan(mapping[cv], mapping[tv])
        if plan.moves:
            moved = dict(plan.moves)
            mapping = tuple(moved.get(q, q) for q in mapping)
        q0, q1 = plan.meet
        ops = swap_ops(plan.swaps)
        ops.append((CX, (q0, q1)))
        logp += math.log(plan.swap_esp) + self.log_cx[q0, q1]
        pos = list(pos)
        pos[cv] += 1
        pos[tv] += 1
        more, lp = self.cascade(pos, mapping, (cv, tv))
        ops += more
        return (tuple(pos), mapping, logp + lp, (trace, tuple(ops)), ngates + len(ops))

    def finish(self, node) -> CompiledCircuit:
        pos, mapping, logp, trace, ngates = node
        segments = []
        while trace is not None:
            trace, seg = trace
            segments.append(seg)
        ops = [op for seg in reversed(segments) for op in seg]
        ops += [(MEASURE, (mapping[g.operands[0]],)) for g in self.measures]
        gates = tuple(Gate(k, q, i) for i, (k, q) in enumerate(ops))
        esp = esp_circuit(self.d, ops)
        return CompiledCircuit(gates, esp, (), mapping, self.nq)


def _node_esp(prob: _Problem, node) -> float:
    logp = node[2] + sum(prob.log_readout[node[1][g.operands[0]]] for g in prob.measures)
    return math.exp(logp)


# ---------------------------------------------------------------- compilers


def _finalize(prob, node, init_map, stats, t0):
    out = prob.finish(node)
    for g in out.gates:
        if g.kind is CX and not prob.d.has_edge(*g.operands):
            raise AssertionError(f"emitted CNOT {g.operands} violates device adjacency")
    stats["seconds"] = time.perf_counter() - t0
    return CompiledCircuit(out.gates, out.esp, tuple(init_map), out.final_mapping,
                           out.num_qubits, stats)


def compile_beam(c: Circuit, d: DeviceModel, cfg: CompilerConfig = CompilerConfig(),
                 pt: PathTable | None = None, initial_mappings=None) -> CompiledCircuit:
    """Beam search over (executed gates, mapping) states, keeping the top
    ``beam_width`` by lookahead score after every executed CNOT.

    ``initial_mappings`` replaces the GCE + random seeding when given.
    """
    t0 = time.perf_counter()
    _check_fits(c, d)
    prob = _Problem(c, d, pt)
    rng = np.random.default_rng(cfg.seed)
    if initial_mappings is None:
        seeds = []
        if cfg.use_gce:
            seeds.append(gce_initial_mapping(c, d, rng))
        seeds += [random_mapping(c, d, rng) for _ in range(cfg.random_mappings)]
    else:
        seeds = [_check_mapping(c, d, m) for m in initial_mappings]
    if not seeds:
        raise MappingError("no initial mappings: enable GCE or use random_mappings >= 1")
    stats = {"expansions": 0, "score_terms": 0, "iterations": prob.n_cnot,
             "initial_states": len(seeds), "max_states": 0}

    # a node also remembers its starting mapping: (node, init)
    layer = _prune(prob, [(prob.initial_node(m), m) for m in dict.fromkeys(seeds)],
                   cfg.beam_width, stats, count=False)
    for _ in range(prob.n_cnot):
        children = []
        for node, init in layer:
            for g in prob.ready(node[0]):
                children.append((prob.expand(node, g), init))
        stats["expansions"] += len(children)
        stats["max_states"] = max(stats["max_states"], len(children))
        layer = _prune(prob, children, cfg.beam_width, stats)

    best = max(layer, key=lambda item: (_node_esp(prob, item[0]), -item[0][4],
                                        _neg(item[0][0]), _neg(item[0][1])))
    return _finalize(prob, best[0], best[1], stats, t0)


def _neg(t):
    return tuple(-x for x in t)


def _prune(prob: _Problem, items, width: int, stats, count=True):
    """Merge duplicate states and keep the ``width`` best by score."""
    if not items:
        raise MappingError("search ran out of states")
    pos = np.array([it[0][0] for it in items], dtype=np.int64)
    maps = np.array([it[0][1] for it in items], dtype=np.int64)
    log_esp = np.array([it[0][2] for it in items])
    log_score, pending = prob.log_scores(log_esp, pos, maps)
    if count:
        stats["score_terms"] += int(pending.sum())
    keyed = {}
    for i, it in enumerate(items):
        node = it[0]
        key = (-float(log_score[i]), -node[2], node[4], node[0], node[1])
        state = (node[0], node[1])
        prev = keyed.get(state)
        if prev is None or key < prev[0]:
            keyed[state] = (key, i)
    ranked = smallest_k(list(keyed.values()), width)
    ranked.sort()
    return [items[i] for _, i in ranked]


def compile_random(c: Circuit, d: DeviceModel, seed: int = 0, pt: PathTable | None = None) -> CompiledCircuit:
    """Baseline: one random placement, then a uniformly random ready CNOT at every step."""
    t0 = time.perf_counter()
    _check_fits(c, d)
    prob = _Problem(c, d, pt)
    rng = np.random.default_rng(seed)
    init = random_mapping(c, d, rng)
    node = prob.initial_node(init)
    stats = {"expansions": 0, "iterations": prob.n_cnot}
    for _ in range(prob.n_cnot):
        ready = prob.ready(node[0])
        stats["expansions"] += len(ready)
        node = prob.expand(node, ready[int(rng.integers(len(ready)))])
    return _finalize(prob, node, init, stats, t0)


# ---------------------------------------------------------------- verification


@dataclass(frozen=True)
class CompileCheck:
    passed: bool
    max_deviation: float
    first_divergence: int | None = None
    message: str = ""

    def __bool__(self):
        return self.passed


def verify_compiled(src: Circuit, out: CompiledCircuit, tol: float = 1e-8,
                    max_touched: int = 20) -> CompileCheck:
    """Check the routed circuit against the source on every basis input.

    Input basis state ``x`` of the variables is placed at the initial mapping
    (all other qubits ``|0>``); the routed circuit must produce ``U_src x``
    placed at the final mapping.
    """
    V = src.num_vars
    if V > 12:
        raise ValueError("verification is limited to 12 variables")
    if len(out.initial_mapping) != V or len(out.final_mapping) != V:
        return CompileCheck(False, math.inf, None, "mapping size does not match the source")
    for g in out.gates:
        if g.kind is MEASURE:
            continue
    src_measured = [out.final_mapping[v] for v in src.measured]
    out_measured = [g.operands[0] for g in out.gates if g.kind is MEASURE]
    if src_measured != out_measured:
        return CompileCheck(False, math.inf, None,
                            f"measured qubits {out_measured} != expected {src_measured}")
    touched = sorted({q for g in out.gates for q in g.operands}
                     | set(out.initial_mapping) | set(out.final_mapping))
    if len(touched) > max_touched:
        raise ValueError(f"{len(touched)} touched qubits exceeds {max_touched}")
    local = {q: i for i, q in enumerate(touched)}
    n = len(touched)
    ops = [(g.kind, tuple(local[q] for q in g.operands)) for g in out.gates if g.kind is not MEASURE]
    U = unitary_of(src.without_measures())

    def place(mapping):
        idx = np.arange(1 << V)
        out_idx = np.zeros_like(idx)
        for v in range(V):
            out_idx |= ((idx >> v) & 1) << local[mapping[v]]
        return out_idx

    init_idx, final_idx = place(out.initial_mapping), place(out.final_mapping)
    chunk = max(1, (1 << 22) >> n)
    worst = 0.0
    for start in range(0, 1 << V, chunk):
        xs = np.arange(start, min(1 << V, start + chunk))
        states = np.zeros((len(xs), 1 << n), dtype=complex)
        states[np.arange(len(xs)), init_idx[xs]] = 1.0
        states = apply_ops(states, ops, n)
        want = np.zeros_like(states)
        want[:, final_idx] = U[:, xs].T
        dev = np.max(np.abs(states - want), axis=1)
        worst = max(worst, float(dev.max()))
        bad = np.nonzero(dev > tol)[0]
        if len(bad):
            x = int(xs[bad[0]])
            return CompileCheck(False, worst, x, f"output differs for input basis state {x}")
    return CompileCheck(True, worst)


def write_compiled(out: CompiledCircuit, stem, extra: dict | None = None) -> tuple[str, str]:
    """Write ``<stem>.qasm`` and ``<stem>.json``; returns both paths."""
    from .qasm import emit_circuit

    qasm_path, report_path = f"{stem}.qasm", f"{stem}.json"
    with open(qasm_path, "w", encoding="utf-8") as fh:
        fh.write(emit_circuit(out.to_circuit()))
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(out.report(**(extra or {})), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return qasm_path, report_path


__all__ = [
    "CompilerConfig", "CompiledCircuit", "SearchState", "SwapPlan", "SwapPlanner", "MappingError",
    "random_mapping", "gce_initial_mapping", "guest_graph", "best_swap", "swap_ops", "update_score",
    "compile_beam", "compile_random", "verify_compiled", "write_compiled",
]
