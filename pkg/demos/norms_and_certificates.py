"""
Norms behind the rates and the certificate
==========================================

Greedy selection is analysed in a set-max norm: for each node, the largest
edge coordinate it can reach. Its dual is sandwiched by the dual of the
non-overlapping variant, where every edge is given to exactly one endpoint.
"""

import numpy as np

from setwise_cd import (
    DualConsensusObjective,
    assignment_report,
    best_assignment_bruteforce,
    certificate_for,
    complete_graph,
    cycle_graph,
    norm_A,
    norm_sm,
    norm_sm_dual_bruteforce,
    star_graph,
)
from setwise_cd.problems import quadratic_network

tri = cycle_graph(3)
print("||(1,1,1)||_A on the triangle =", norm_A(np.ones(3), tri))
print("cycle vector (1,-1,1) has ||.||_A =", round(norm_A(np.array([1.0, -1.0, 1.0]), tri), 12))
print("||(2,1,0)||_SM =", norm_sm([2.0, 1.0, 0.0], tri))

# the sandwich on a few random vectors
rng = np.random.default_rng(0)
topo = complete_graph(4)
for _ in range(3):
    z = rng.standard_normal(topo.num_edges)
    sm = norm_sm_dual_bruteforce(z, topo) ** 2
    _, no = best_assignment_bruteforce(z, topo)
    print(f"0.5 NO^2 = {0.5 * no**2:.4f} <= SM^2 = {sm:.4f} <= NO^2 = {no**2:.4f}")

# taking the largest per-assignment closed form overshoots the coupled norm
rep = assignment_report(np.ones(3), star_graph(3))
print(f"star, z=1: coupled {rep.coupled_value:.4f}, closed form ranges "
      f"[{rep.closed_form_min:.4f}, {rep.closed_form_max:.4f}]")

obj = DualConsensusObjective(cycle_graph(8), quadratic_network(8, 2, seed=0, c_big=10.0))
print(certificate_for(obj).to_json())
