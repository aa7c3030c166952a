"""Version-space diameter: the error floor of the noise-free problem.

The version space is everything in the class that agrees with the true
parameter on the realized design. Its reach from t0 is probed along null
space directions; it shrinks as rows accumulate and vanishes at full rank,
and it stays below the intrinsic fixed point.
"""

import numpy as np

from ermbounds import ClassSpec, DesignSpec, beta_star, choose_tau, sample_design, version_diameter

n = 16
cls = ClassSpec(n=n, R=1.0, t0=np.zeros(n))
design = DesignSpec("gaussian", n)

print("probed version-space radius as the sample grows (nested rows):")
X = sample_design(design, n, seed=5)
for N in (0, 2, 4, 8, 12, 16):
    probe = version_diameter(X[:N], cls, probes=2000, seed=5)
    print(f"  N={N:3d}: radius_lb = {probe.radius_lb:.4f}  (null space dim {probe.nullspace_dim})")

choice = choose_tau(design, directions=200, draws=10000, seed=5)
beta = beta_star(cls, design, 8, choice.gamma_beta, trials=100, seed=5)
probe = version_diameter(X[:8], cls, probes=2000, seed=5)
print(f"\nat N=8: radius_lb = {probe.radius_lb:.4f} <= beta* = {beta.value:.4f} (flags {beta.flags})")
