"""Deterministic vector geometry over l1 and l2 balls.

Everything here is a pure function of its arguments: Euclidean projection
onto a scaled l1 ball, the l2 norm of the top-d entries of the decreasing
rearrangement, and the exact support function of an l1/l2 ball
intersection. These are the kernels behind every localized supremum
computed elsewhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative slack used when comparing norms against ball radii.
REL_SLACK = 1e-12


def as_vector(v) -> np.ndarray:
    """Coerce to a finite 1-d float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a nonempty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


@dataclass(frozen=True)
class BallIntersection:
    """The set {t : ||t||_1 <= l1_radius, ||t||_2 <= l2_radius} in R^dim."""

    l1_radius: float
    l2_radius: float
    dim: int

    def __post_init__(self):
        if self.l1_radius < 0 or self.l2_radius < 0:
            raise ValueError("ball radii must be nonnegative")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")


def project_l1(v, radius: float) -> np.ndarray:
    """Euclidean projection of v onto the l1 ball of the given radius.

    Sort-based thresholding, O(n log n). If v is already feasible it is
    returned unchanged (as a copy), so feasible inputs are fixed points
    bit for bit.
    """
    arr = as_vector(v)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    if radius == 0.0:
        return np.zeros_like(arr)
    a = np.abs(arr)
    if a.sum() <= radius * (1.0 + REL_SLACK):
        return arr.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, arr.size + 1)
    # Largest k with u_k > (sum of top k - radius)/k; always holds at k=1.
    feasible = u > (css - radius) / ks
    k = np.nonzero(feasible)[0].max()
    theta = (css[k] - radius) / (k + 1.0)
    return np.sign(arr) * np.maximum(a - theta, 0.0)


def top_d_l2(z, d: int) -> float:
    """l2 norm of the d largest entries of |z| (decreasing rearrangement)."""
    arr = as_vector(z)
    if not 1 <= d <= arr.size:
        raise ValueError(f"d must lie in [1, {arr.size}], got {d}")
    a = np.sort(np.abs(arr))[::-1]
    return float(np.sqrt(np.sum(a[:d] ** 2)))


def rearrangement_d(l1_radius: float, l2_radius: float, dim: int) -> int:
    """Sparsity level matching an l1/l2 radius ratio: ceil((rho/s)^2), clamped to [1, dim].

    Ceiling keeps the associated top-d comparison an upper bound; the clamp
    handles degenerate radius ratios.
    """
    if l2_radius <= 0:
        return dim
    raw = int(np.ceil((l1_radius / l2_radius) ** 2))
    return min(max(raw, 1), dim)


def support_l1l2_batch(Z, ball: BallIntersection) -> np.ndarray:
    """Row-wise support function sup{<z,t> : ||t||_1 <= rho, ||t||_2 <= s}.

    Evaluated through the dual form min over lam >= 0 of
    rho*lam + s*||soft_threshold(z, lam)||_2, which is convex in lam. The
    candidate set is every breakpoint lam in {0} union {|z_i|} plus the
    interior stationary point of each inter-breakpoint segment (where the
    objective is rho*lam + s*sqrt(quadratic), so the stationary point has a
    closed form). The minimum over the candidates is the exact value.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if Z.ndim != 2:
        raise ValueError("Z must be a vector or a matrix of row vectors")
    if not np.all(np.isfinite(Z)):
        raise ValueError("entries must be finite")
    m, n = Z.shape
    if n != ball.dim:
        raise ValueError(f"dimension mismatch: vectors have {n} entries, set has dim {ball.dim}")
    rho, s = float(ball.l1_radius), float(ball.l2_radius)

    absZ = np.abs(Z)
    # Trivial branches. ||t||_2 <= ||t||_1 makes the l2 cap inactive when
    # s >= rho; ||t||_1 <= sqrt(n)||t||_2 makes the l1 cap inactive when
    # rho >= s*sqrt(n). Returned in closed form so these cases are exact.
    if s >= rho:
        return rho * absZ.max(axis=1)
    if rho >= s * np.sqrt(n):
        return s * np.sqrt((Z * Z).sum(axis=1))

    U = -np.sort(-absZ, axis=1)  # decreasing rearrangement
    zero_col = np.zeros((m, 1))
    P1 = np.concatenate([zero_col, np.cumsum(U, axis=1)], axis=1)  # P1[:, k] = sum of top k
    P2 = np.concatenate([zero_col, np.cumsum(U * U, axis=1)], axis=1)

    # Breakpoint candidates lam = U[:, j] for j < n, plus lam = 0 at j = n.
    lam_b = np.concatenate([U, zero_col], axis=1)
    j = np.arange(n + 1)
    q_b = P2 - 2.0 * lam_b * P1 + j * lam_b**2
    g_break = rho * lam_b + s * np.sqrt(np.maximum(q_b, 0.0))

    # Interior stationary points: with k coordinates active, the objective is
    # rho*lam + s*sqrt(Q_k - 2*m_k*lam + k*lam^2); its stationary point is
    # lam = m_k/k - (rho/k)*sqrt((k*Q_k - m_k^2)/(s^2*k - rho^2)),
    # valid only when s^2*k > rho^2 and lam falls inside the segment.
    k = np.arange(1, n + 1)
    m_k = P1[:, 1:]
    Q_k = P2[:, 1:]
    D = s * s * k - rho * rho
    A = np.maximum(k * Q_k - m_k**2, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_st = (m_k - rho * np.sqrt(A / D)) / k
    seg_lo = np.concatenate([U[:, 1:], zero_col], axis=1)
    seg_hi = U
    scale = U[:, :1] + 1.0
    tol = REL_SLACK * scale
    valid = (D > 0) & np.isfinite(lam_st) & (lam_st >= seg_lo - tol) & (lam_st <= seg_hi + tol) & (lam_st >= -tol)
    lam_st = np.clip(lam_st, 0.0, None)
    q_st = Q_k - 2.0 * lam_st * m_k + k * lam_st**2
    g_st = np.where(valid, rho * lam_st + s * np.sqrt(np.maximum(q_st, 0.0)), np.inf)

    return np.minimum(g_break.min(axis=1), g_st.min(axis=1))


def support_l1l2(z, ball: BallIntersection) -> float:
    """Exact support function of an l1/l2 ball intersection at z."""
    arr = as_vector(z)
    return float(support_l1l2_batch(arr[None, :], ball)[0])
