"""Design and noise distributions, and the norms that parametrize the bounds.

Every design kind is standardized to mean zero, variance one per coordinate,
making the design vector isotropic. The noise functionals shown here are the
subgaussian norm (fit empirically by bisection) and the L_{2,1} norm, the
survival-function integral that measures the effective noise level.
"""

import numpy as np

from ermbounds import DesignSpec, NoiseSpec, l21_norm, psi2_norm, sample_design

SEED = 7

print("isotropy check, E<X,t>^2 vs ||t||_2^2, at 200k draws per kind:")
for spec in (
    DesignSpec("rademacher", 4),
    DesignSpec("bounded_uniform", 4),
    DesignSpec("gaussian", 4),
    DesignSpec("student_t", 4, p=4.0),
    DesignSpec("symmetrized_pareto", 4, p=4.0),
):
    X = sample_design(spec, 200000, seed=SEED)
    t = np.array([0.5, -1.0, 0.25, 2.0])
    print(f"  {spec.kind:20s} {np.mean((X @ t) ** 2):8.4f}  (target {t @ t:.4f})")

print("\nsubgaussian norm of 1e6 standard normals (analytic sqrt(8/3) = 1.633):")
g = sample_design(DesignSpec("gaussian", 1), 1000000, seed=SEED).ravel()
print("  psi2 =", psi2_norm(g))

print("\nL_{2,1} norms at sigma = 0.5:")
for noise in (
    NoiseSpec("zero"),
    NoiseSpec("scaled_sign", sigma=0.5),
    NoiseSpec("gaussian", sigma=0.5),
    NoiseSpec("bounded_symmetric", sigma=0.5, kappa=2.0),
    NoiseSpec("heavy_tailed", sigma=0.5, p=4.0),
):
    print(f"  {noise.kind:18s} {l21_norm(noise):.6f}")
