"""
Device models and most reliable SWAP paths
==========================================

Load a bundled calibration, look at its spread of error rates and compare
the most reliable SWAP route with the shortest one.
"""

import numpy as np

from esp_router import all_pairs_best_paths, bundled_device
from esp_router.device import bfs_distances, eccentricity

d = bundled_device("tokyo_spread")
cx = np.array([e.cx_error for e in d.edges])
print(f"{d.name}: {d.num_qubits} qubits, {len(d.edges)} couplers")
print(f"CNOT error mean {cx.mean():.4f}, best {cx.min():.4f}, worst {cx.max():.4f}")
print("eccentricities:", [eccentricity(d, q) for q in range(d.num_qubits)])

pt = all_pairs_best_paths(d)

# count pairs where the most reliable route is longer than the shortest one
longer = 0
for u in range(d.num_qubits):
    dist = bfs_distances(d.adjacency, u)
    for v in range(d.num_qubits):
        if pt.hops[u, v] > dist[v]:
            longer += 1
print(f"{longer} ordered pairs take a detour to dodge bad couplers")

u, v = 3, 15
print(f"moving qubit {u} to {v}: path {pt.path(u, v)}, SWAP ESP {pt.esp[u, v]:.4f}")
