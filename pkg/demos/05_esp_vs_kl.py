"""
Does higher ESP mean better output?
===================================

Compile the 1-bit adder with beam search and with the random baseline,
run every compilation through the Pauli-noise simulator and correlate ESP
with the KL divergence between ideal and sampled output distributions.
"""

import numpy as np

from esp_router import (CompilerConfig, all_pairs_best_paths, bundled_device, compile_beam, compile_random,
                        gen_cuccaro_adder, ideal_distribution, kl_divergence)
from esp_router.evaluator import Distribution, format_records, run_experiment

d = bundled_device("tokyo_spread")
pt = all_pairs_best_paths(d)
c = gen_cuccaro_adder(1)

items = [(f"beam-{s}", "beam", compile_beam(c, d, CompilerConfig(1000, 100, seed=s), pt=pt)) for s in range(8)]
items += [(f"random-{s}", "random", compile_random(c, d, seed=s, pt=pt)) for s in range(8)]

records, corr = run_experiment(items, d, runs=5, shots=5000, seed=11)
print(format_records(records, corr))

# for scale: a device that outputs uniform noise
uniform = Distribution(np.full(4, 0.25), 2)
print(f"KL of uniform output: {kl_divergence(ideal_distribution(c), uniform):.4f} nats")
