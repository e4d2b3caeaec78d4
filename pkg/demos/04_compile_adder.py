"""
Compiling the adder: beam search against the random baseline
=============================================================

Map and route the 1-bit adder onto the spread Tokyo device, check the
result is still the same computation and compare ESPs.
"""

import time

import numpy as np

from esp_router import CompilerConfig, all_pairs_best_paths, bundled_device, compile_beam, compile_random, gen_cuccaro_adder, verify_compiled

d = bundled_device("tokyo_spread")
pt = all_pairs_best_paths(d)
c = gen_cuccaro_adder(1)

t0 = time.perf_counter()
out = compile_beam(c, d, CompilerConfig(beam_width=10000, random_mappings=1000, seed=0), pt=pt)
print(f"beam: {out.gate_count} gates, ESP {out.esp:.4f}, {time.perf_counter() - t0:.2f}s")
print("  initial mapping", out.initial_mapping, "final mapping", out.final_mapping)
print("  equivalent to source:", verify_compiled(c, out).passed)

rand = [compile_random(c, d, seed=s, pt=pt) for s in range(20)]
esps = np.array([r.esp for r in rand])
print(f"random x20: ESP median {np.median(esps):.4f}, best {esps.max():.4f}, "
      f"gates {min(r.gate_count for r in rand)}..{max(r.gate_count for r in rand)}")

# wider beams see more states
for width in (1, 10, 100, 1000):
    o = compile_beam(gen_cuccaro_adder(2), d, CompilerConfig(width, 50, seed=0), pt=pt)
    print(f"2-bit adder, B={width:>4}: ESP {o.esp:.4f}, {o.gate_count} gates, "
          f"{o.stats['expansions']} expansions")
