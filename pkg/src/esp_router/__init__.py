"""Noise-aware qubit mapping and routing that maximizes estimated success probability."""
from .adder import gen_cuccaro_adder
from .circuit import Circuit, CircuitError, DependencyDAG, Gate, GateKind, build_dependencies
from .device import (DeviceModel, PathTable, all_pairs_best_paths, bundled_device, esp_circuit,
                     esp_gate, load_device, load_device_file)
from .evaluator import (Distribution, NoiseConfig, ideal_distribution, kl_divergence, noisy_sample,
                        run_experiment)
from .mapper import (CompiledCircuit, CompilerConfig, best_swap, compile_beam, compile_random,
                     gce_initial_mapping, random_mapping, update_score, verify_compiled)
from .qasm import CircuitSyntaxError, emit_circuit, parse_circuit
from .remote_cnot import RemoteCnotTemplate, candidate_set, select_best, templates_for_path, verify_template

__version__ = "0.1.0"

__all__ = [
    "gen_cuccaro_adder", "Circuit", "CircuitError", "DependencyDAG", "Gate", "GateKind", "build_dependencies",
    "DeviceModel", "PathTable", "all_pairs_best_paths", "bundled_device", "esp_circuit", "esp_gate",
    "load_device", "load_device_file", "Distribution", "NoiseConfig", "ideal_distribution", "kl_divergence",
    "noisy_sample", "run_experiment", "CompiledCircuit", "CompilerConfig", "best_swap", "compile_beam",
    "compile_random", "gce_initial_mapping", "random_mapping", "update_score", "verify_compiled",
    "CircuitSyntaxError", "emit_circuit", "parse_circuit", "RemoteCnotTemplate", "candidate_set",
    "select_best", "templates_for_path", "verify_template",
]
