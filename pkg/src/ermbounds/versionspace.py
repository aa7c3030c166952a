"""Lower bounds on the L2 diameter of the version space of an l1-ball class.

The version space of t0 on a realized design is every feasible t agreeing
with t0 on all sample points, i.e. t0 plus the null space of the design
intersected with the ball. Probing random and basis-aligned null-space
directions and stepping as far as the l1 constraint allows gives a certified
lower bound on the farthest version-space point from t0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .erm import ClassSpec
from .rng import DIRECTIONS_TAG, substream


@dataclass(frozen=True)
class VersionSpaceProbe:
    radius_lb: float
    directions: int
    nullspace_dim: int
    witness: np.ndarray

    def to_record(self) -> dict:
        return {
            "radius_lb": self.radius_lb,
            "directions": self.directions,
            "nullspace_dim": self.nullspace_dim,
        }


def nullspace_basis(design: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal null-space basis; singular values below rel_tol*max count as zero."""
    n = design.shape[1]
    if design.shape[0] == 0:
        return np.eye(n)
    return scipy.linalg.null_space(design, rcond=rel_tol)


def max_step_l1(t0: np.ndarray, u: np.ndarray, R: float, iters: int = 60) -> float:
    """Largest s >= 0 with ||t0 + s*u||_1 <= R, for a unit direction u.

    ||t0 + s*u||_1 is convex in s and feasible at s = 0, so the feasible
    steps form an interval; bisection keeps the returned point feasible.
    """
    hi = 2.0 * R * (1.0 + 1e-6)
    if np.abs(t0 + hi * u).sum() <= R:
        return hi
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.abs(t0 + mid * u).sum() <= R:
            lo = mid
        else:
            hi = mid
    return lo


def _max_steps_batch(t0: np.ndarray, U: np.ndarray, R: float, iters: int = 60) -> np.ndarray:
    hi = np.full(U.shape[0], 2.0 * R * (1.0 + 1e-6))
    lo = np.zeros(U.shape[0])
    at_cap = np.abs(t0[None, :] + hi[:, None] * U).sum(axis=1) <= R
    lo[at_cap] = hi[at_cap]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        feas = np.abs(t0[None, :] + mid[:, None] * U).sum(axis=1) <= R
        lo = np.where(feas, mid, lo)
        hi = np.where(feas, hi, mid)
    return lo


def version_diameter(design: np.ndarray, class_spec: ClassSpec, probes: int = 1000, seed: int = 0) -> VersionSpaceProbe:
    """Probe the farthest version-space point from t0 along null-space directions.

    Both u and -u are probed for every direction (the step set need not be
    symmetric), together with the basis-aligned null-space directions. The
    result is a lower bound on the true maximum with the stated probe count.
    """
    design = np.asarray(design, dtype=np.float64)
    if design.ndim != 2 or design.shape[1] != class_spec.n:
        raise ValueError("design must be an N x n matrix matching the class")
    basis = nullspace_basis(design)
    dim = basis.shape[1]
    if dim == 0:
        return VersionSpaceProbe(0.0, 0, 0, class_spec.t0.copy())
    rng = substream(seed, DIRECTIONS_TAG)
    coeffs = rng.standard_normal((probes, dim))
    U = coeffs @ basis.T
    norms = np.linalg.norm(U, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    U /= norms
    U = np.vstack([U, -U, basis.T, -basis.T])
    steps = _max_steps_batch(class_spec.t0, U, class_spec.R)
    best = int(np.argmax(steps))
    witness = class_spec.t0 + steps[best] * U[best]
    return VersionSpaceProbe(float(steps[best]), U.shape[0], dim, witness)
