"""Small devices and independent brute-force oracles shared by the tests."""
from __future__ import annotations

import itertools
import math

import numpy as np

from esp_router.circuit import Circuit, GateKind
from esp_router.device import CouplingEdge, DeviceModel, PhysQubit

CX, M = GateKind.CNOT, GateKind.MEASURE
TOL = 1e-12


def make_device(n, edges, cx=0.02, single=0.001, readout=0.03, name="test"):
    """``cx``/``single``/``readout`` may be scalars or per-item sequences."""
    def each(v, k):
        return list(v) if np.ndim(v) else [v] * k
    cxs, ss, rs = each(cx, len(edges)), each(single, n), each(readout, n)
    return DeviceModel(name, tuple(PhysQubit(i, ss[i], rs[i]) for i in range(n)),
                       tuple(CouplingEdge(a, b, e) for (a, b), e in zip(edges, cxs)))


def random_connected_device(rng, n, extra_edges=1, name="rand"):
    perm = rng.permutation(n)
    edges = {tuple(sorted((int(perm[i]), int(perm[rng.integers(i)])))) for i in range(1, n)}
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in edges]
    rng.shuffle(pairs)
    edges |= set(pairs[:extra_edges])
    edges = sorted(edges)
    return make_device(n, edges, cx=rng.uniform(0.005, 0.15, len(edges)),
                       single=rng.uniform(0.0005, 0.01, n), readout=rng.uniform(0.01, 0.1, n), name=name)


def random_cnot_circuit(rng, num_vars, num_cnots, measure=False):
    ops = []
    for _ in range(num_cnots):
        a, b = rng.choice(num_vars, 2, replace=False)
        ops.append((CX, (int(a), int(b))))
    if measure:
        ops += [(M, (v,)) for v in range(num_vars)]
    return Circuit.from_ops(num_vars, ops)


def random_circuit(rng, num_vars, num_gates, measure=True):
    singles = [k for k in GateKind if k.is_single]
    ops = []
    for _ in range(num_gates):
        if num_vars > 1 and rng.random() < 0.5:
            a, b = rng.choice(num_vars, 2, replace=False)
            ops.append((CX, (int(a), int(b))))
        else:
            ops.append((singles[rng.integers(len(singles))], (int(rng.integers(num_vars)),)))
    if measure:
        ops += [(M, (v,)) for v in rng.permutation(num_vars)[: max(1, num_vars // 2)]]
    return Circuit.from_ops(num_vars, ops)


# ---------------------------------------------------------------- path oracles


def simple_paths(d: DeviceModel, u: int, v: int):
    """All simple paths u -> v by depth-first enumeration."""
    out = []
    stack = [(u,)]
    while stack:
        p = stack.pop()
        if p[-1] == v:
            out.append(p)
            continue
        for w in d.adjacency[p[-1]]:
            if w not in p:
                stack.append(p + (w,))
    return out


def product_esp(d, path):
    esp = 1.0
    for a, b in zip(path, path[1:]):
        esp *= (1.0 - d.cx_error[a, b]) ** 3
    return esp


def best_path_bruteforce(d, u, v):
    """Highest SWAP-ESP path; near-ties go to fewer hops then the smaller sequence."""
    best = None
    for p in simple_paths(d, u, v):
        e = product_esp(d, p)
        if best is None or e > best[0] * (1 + TOL) or (abs(e - best[0]) <= TOL * best[0]
                                                        and (len(p), p) < (len(best[1]), best[1])):
            best = (e, p)
    return best


def reliability_search(d, source):
    """Single-source max-product search (Dijkstra on -ln ESP)."""
    import heapq

    dist = {source: 0.0}
    heap = [(0.0, source)]
    done = set()
    while heap:
        c, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y in d.adjacency[x]:
            nc = c - 3.0 * math.log1p(-d.cx_error[x, y])
            if nc < dist.get(y, math.inf):
                dist[y] = nc
                heapq.heappush(heap, (nc, y))
    return {q: math.exp(-c) for q, c in dist.items()}


# ---------------------------------------------------------------- routing oracle


def meeting_edge_bruteforce(d, pc, pt):
    """Best (control path, target path, q0, q1) by direct enumeration."""
    paths = {}

    def bp(u, v):
        if (u, v) not in paths:
            paths[(u, v)] = best_path_bruteforce(d, u, v)
        return paths[(u, v)]

    best = None
    for e in d.edges:
        for q0, q1 in ((e.q0, e.q1), (e.q1, e.q0)):
            ec, path_c = bp(pc, q0)
            et, path_t = bp(pt, q1)
            if pt in path_c or q0 in path_t:
                continue
            esp = ec * et * (1.0 - d.cx_error[q0, q1])
            n = len(path_c) + len(path_t) - 2
            if best is None or esp > best[0] + TOL * max(esp, best[0]) or (
                    abs(esp - best[0]) <= TOL * max(esp, best[0]) and (n, (q0, q1)) < (best[1], best[2])):
                best = (esp, n, (q0, q1), path_c, path_t)
    return best[3], best[4], best[2][0], best[2][1]


def topological_orders(c: Circuit):
    """Every gate order that respects per-variable program order."""
    gates = list(c.gates)
    last_on = {}
    preds = []
    for i, g in enumerate(gates):
        preds.append({last_on[v] for v in g.operands if v in last_on})
        for v in g.operands:
            last_on[v] = i

    def rec(done, order):
        if len(order) == len(gates):
            yield list(order)
            return
        for i in range(len(gates)):
            if i not in done and preds[i] <= done:
                done.add(i)
                order.append(i)
                yield from rec(done, order)
                order.pop()
                done.remove(i)

    yield from rec(set(), [])


def route_bruteforce(c: Circuit, d: DeviceModel):
    """Max ESP over all injective mappings x gate orders, routing each CNOT by
    the enumerated best meeting edge. Measurements are charged at the end."""
    best = 0.0
    memo = {}
    orders = list(topological_orders(c))
    for mapping in itertools.permutations(range(d.num_qubits), c.num_vars):
        for order in orders:
            loc = list(mapping)
            esp = 1.0
            for i in order:
                g = c.gates[i]
                if g.kind is M:
                    continue
                if g.kind is not CX:
                    esp *= 1.0 - d.single_error[loc[g.operands[0]]]
                    continue
                pc, ptg = loc[g.operands[0]], loc[g.operands[1]]
                if (pc, ptg) not in memo:
                    memo[(pc, ptg)] = meeting_edge_bruteforce(d, pc, ptg)
                path_c, path_t, q0, q1 = memo[(pc, ptg)]
                where = {q: v for v, q in enumerate(loc)}
                for path in (path_c, path_t):
                    for a, b in zip(path, path[1:]):
                        esp *= (1.0 - d.cx_error[a, b]) ** 3
                        va, vb = where.get(a), where.get(b)
                        if va is not None:
                            loc[va] = b
                        if vb is not None:
                            loc[vb] = a
                        where = {q: v for v, q in enumerate(loc)}
                esp *= 1.0 - d.cx_error[q0, q1]
            for g in c.gates:
                if g.kind is M:
                    esp *= 1.0 - d.readout_error[loc[g.operands[0]]]
            best = max(best, esp)
    return best


def all_mappings(c: Circuit, d: DeviceModel):
    return list(itertools.permutations(range(d.num_qubits), c.num_vars))
