"""
Graphs, incidence matrices and Laplacian spectra
================================================

Every edge of a communication graph carries one dual coordinate. The two
extreme nonzero Laplacian eigenvalues set the global smoothness and strong
convexity constants of the dual objective.
"""

import numpy as np

from setwise_cd import (
    build_incidence,
    generate_erdos_renyi,
    generate_regular,
    global_constants,
    laplacian_spectrum,
    star_graph,
)

# a star with three leaves: the centre holds every edge
star = star_graph(3)
print("star edges:", star.edges)
print("incidence:\n", build_incidence(star))
spec = laplacian_spectrum(star)
print(f"gamma_max = {spec.gamma_max:.3f}, gamma_min+ = {spec.gamma_min_plus:.3f}")

# A A^T is the Laplacian
A = build_incidence(star)
print("degrees on the diagonal:", np.diag(A @ A.T))

# the graphs used by the presets
for topo in (generate_regular(32, 8, 0), generate_regular(32, 12, 0), generate_erdos_renyi(32, 0.1, 0)):
    s = laplacian_spectrum(topo)
    L, sigma = global_constants(s, mu_min=2.0, M_max=200.0)
    print(f"n={topo.n} edges={topo.num_edges:3d} N_max={topo.max_degree:2d} "
          f"gamma ratio={s.gamma_max / s.gamma_min_plus:6.2f} L={L:.3f} sigma_A={sigma:.5f}")
