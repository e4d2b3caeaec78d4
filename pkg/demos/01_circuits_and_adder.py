"""
Circuits, the text format and the adder testbench
=================================================

Build the ripple-carry adder, write it as OpenQASM, read it back and check
that it really adds.
"""

import numpy as np

from esp_router import emit_circuit, gen_cuccaro_adder, ideal_distribution, parse_circuit

# gate totals grow by 37 per input bit
for n in (1, 2, 4):
    c = gen_cuccaro_adder(n)
    print(f"{n}-bit adder: {len(c.gates)} gates on {c.num_vars} variables, {c.num_cnots} CNOTs")

# round trip through the text format
c = gen_cuccaro_adder(1)
text = emit_circuit(c)
print(text.splitlines()[:4], "...")
assert parse_circuit(text).same_ops(c)

# both inputs start in uniform superposition, so the measured sum follows the
# distribution of adding two random numbers
dist = ideal_distribution(gen_cuccaro_adder(2))
for s, p in dist.as_dict(1e-12).items():
    print(f"sum {s}: {p:.4f}  {'#' * int(round(p * 64))}")
print("matches convolution:", np.allclose(dist.probs[:7], np.convolve([0.25] * 4, [0.25] * 4)))
