"""
Choosing a remote CNOT realization by ESP
=========================================

A CNOT between qubits with no coupler can be built several ways. Each is
checked to be a CNOT (up to qubit relocation), then ranked by estimated
success probability, then the ranking is compared with noisy simulation.
"""

from esp_router import bundled_device
from esp_router.evaluator import template_success_rate
from esp_router.remote_cnot import candidate_set, format_table, templates_for_path, verify_template

for t in templates_for_path((0, 1, 2)):
    print(verify_template(t))

d = bundled_device("tokyo_spread")
cs = candidate_set(d, 3, 15, max_hops=4)
print(f"\n{len(cs)} candidates for CNOT(3 -> 15); top five:")
print("\n".join(format_table(cs).splitlines()[:6]))

# two-hop case: simulated success of each candidate against its ESP
cs = candidate_set(d, 0, 2, max_hops=2)
print("\nname   path      esp     simulated")
for i, c in enumerate(list(cs)[:7]):
    rate = template_success_rate(d, c.template.gate_seq, 50_000, seed=i)
    print(f"{c.name:<6} {'-'.join(map(str, c.path)):<9} {c.esp:.4f}  {rate:.4f}")
