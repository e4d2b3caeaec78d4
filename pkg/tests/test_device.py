import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from esp_router.circuit import GateKind
from esp_router.device import (BUNDLED, CALIBRATION, TOKYO_EDGES, AdjacencyError, DeviceError,
                               all_pairs_best_paths, bundled_device, eccentricity, esp_circuit,
                               esp_gate, load_device, spread_values)

from helpers import best_path_bruteforce, make_device, product_esp, random_connected_device, reliability_search

CX, M = GateKind.CNOT, GateKind.MEASURE


def test_tokyo_topology_facts():
    d = bundled_device("tokyo")
    assert d.num_qubits == 20 and len(d.edges) == len(TOKYO_EDGES) == 43
    ecc = [eccentricity(d, q) for q in range(20)]
    assert max(ecc) == 4
    assert ecc[0] == ecc[4] == ecc[15] == ecc[19] == 4
    assert min(ecc) == 3


def test_bundled_calibration_means():
    for machine in CALIBRATION:
        cal = CALIBRATION[machine]
        for variant in (machine, machine + "_spread"):
            d = bundled_device(variant)
            cx = [e.cx_error for e in d.edges]
            assert np.mean(cx) == pytest.approx(cal["cx"][0], rel=1e-9)
            assert np.mean(d.single_error) == pytest.approx(cal["single"][0], rel=1e-9)
        spread = bundled_device(machine + "_spread")
        assert min(e.cx_error for e in spread.edges) == cal["cx"][1]
        assert max(e.cx_error for e in spread.edges) == cal["cx"][2]


def test_spread_values_pins_bounds():
    v = spread_values(np.random.default_rng(1), 30, 0.03, 0.01, 0.09)
    assert min(v) == 0.01 and max(v) == 0.09
    assert np.mean(v) == pytest.approx(0.03, rel=1e-9)


def test_device_validation():
    with pytest.raises(DeviceError, match="connected"):
        make_device(4, [(0, 1), (2, 3)])
    with pytest.raises(DeviceError, match="duplicate"):
        make_device(2, [(0, 1), (1, 0)])
    with pytest.raises(DeviceError, match="self-loop"):
        make_device(2, [(0, 1), (1, 1)])
    with pytest.raises(DeviceError):
        make_device(2, [(0, 1)], cx=1.0)
    with pytest.raises(DeviceError):
        make_device(2, [(0, 1)], single=-0.1)
    with pytest.raises(DeviceError, match="JSON"):
        load_device("{")
    with pytest.raises(DeviceError, match="bundled"):
        bundled_device("nowhere")
    assert set(BUNDLED) >= {"tokyo", "tokyo_spread"}


def test_json_roundtrip():
    d = bundled_device("poughkeepsie_spread")
    back = load_device(d.to_json())
    assert back == d
    assert json.loads(d.to_json())["name"] == "poughkeepsie_spread"


def test_esp_gate_and_circuit():
    d = make_device(3, [(0, 1), (1, 2)], cx=[0.1, 0.2], single=[0.01, 0.02, 0.03], readout=[0.1, 0.2, 0.3])
    assert esp_gate(d, CX, (1, 0)) == pytest.approx(0.9)
    assert esp_gate(d, GateKind.H, 2) == pytest.approx(0.97)
    with pytest.raises(AdjacencyError):
        esp_gate(d, CX, (0, 2))
    placed = [(GateKind.H, (0,)), (CX, (0, 1)), (CX, (1, 2)), (M, (1,)), (M, (1,)), (M, (2,))]
    assert esp_circuit(d, placed) == pytest.approx(0.99 * 0.9 * 0.8 * 0.8 * 0.7)
    assert d.swap_esp(1, 2) == pytest.approx(0.8 ** 3)


def test_path_table_simple_line():
    d = make_device(4, [(0, 1), (1, 2), (2, 3)], cx=[0.1, 0.01, 0.1])
    pt = all_pairs_best_paths(d)
    assert pt.path(0, 3) == (0, 1, 2, 3)
    assert pt.swaps(0, 2) == [(0, 1), (1, 2)]
    assert pt.esp[0, 3] == pytest.approx((0.9 * 0.99 * 0.9) ** 3)
    assert pt.hops[3, 0] == 3 and pt.path(2, 2) == (2,)


def test_path_table_prefers_reliable_detour():
    # direct 0-3 coupler is terrible; 0-1-2-3 is better
    d = make_device(4, [(0, 1), (1, 2), (2, 3), (0, 3)], cx=[0.01, 0.01, 0.01, 0.2])
    assert all_pairs_best_paths(d).path(0, 3) == (0, 1, 2, 3)


def test_path_table_ties_fewer_hops_then_lexicographic():
    # uniform square: 0->2 via 1 or 3, both two hops, pick (0, 1, 2)
    d = make_device(4, [(0, 1), (1, 2), (2, 3), (0, 3)], cx=0.05)
    pt = all_pairs_best_paths(d)
    assert pt.path(0, 2) == (0, 1, 2)
    assert pt.path(2, 0) == (2, 1, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 8))
def test_path_table_matches_bruteforce(seed, n):
    rng = np.random.default_rng(seed)
    d = random_connected_device(rng, n, extra_edges=int(rng.integers(0, 6)))
    pt = all_pairs_best_paths(d)
    for u, v in itertools.permutations(range(n), 2):
        esp, path = best_path_bruteforce(d, u, v)
        assert pt.esp[u, v] == pytest.approx(esp, rel=1e-12)
        assert product_esp(d, pt.path(u, v)) == pytest.approx(esp, rel=1e-12)
        assert pt.path(u, v)[0] == u and pt.path(u, v)[-1] == v


def test_path_table_tokyo_vs_reliability_search():
    d = bundled_device("tokyo_spread")
    pt = all_pairs_best_paths(d)
    for s in range(d.num_qubits):
        ref = reliability_search(d, s)
        for v, esp in ref.items():
            assert abs(pt.esp[s, v] - esp) <= 1e-12
    assert np.isfinite(pt.cost).all()
