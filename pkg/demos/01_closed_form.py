"""
Attachment that minimises the worst exposure
============================================

A new node picks a partner at random. If partner ``j`` is chosen with
probability ``p_j`` and brings unfitness ``U_j = 1/phi_j``, the worst
expected exposure is ``max_j p_j U_j``. Minimising it spreads the risk
evenly, and the resulting ``p`` is proportional to fitness.
"""

import numpy as np

from minmax_attach import (
    LognormalSpec,
    closed_form_solution,
    nodes_from_fitness,
    proportional_attachment,
    sample_lognormal,
    verify_kkt,
)

# twelve nodes with log-normal fitness
phi = sample_lognormal(LognormalSpec(mu=0.0, sigma=1.0), 12, seed=1)
nodes = nodes_from_fitness(phi)

sol = closed_form_solution(nodes)
print("fitness       p        p*U")
for n, p in zip(nodes, sol.p):
    print(f"{n.fitness:8.4f}  {p:8.5f}  {p * n.unfitness:.6f}")

# every node carries the same exposure, and it equals 1 / total fitness
print("value      ", sol.value)
print("1/sum(phi) ", 1 / phi.sum())

# proportional attachment gives the same probabilities
print("max |p - phi/sum(phi)| =", np.max(np.abs(sol.p - proportional_attachment(phi))))

# the optimality report
print(verify_kkt(nodes, sol))
