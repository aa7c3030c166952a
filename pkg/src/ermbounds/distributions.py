"""Samplers for the design and noise distributions, plus norm estimators.

Every design kind is standardized internally so the coordinate law has mean
zero and variance one, which makes a design matrix with iid coordinates an
isotropic random vector: E<X,t>^2 = ||t||_2^2 for every t.

Sampling is deterministic given (spec, seed, trial); see rng.substream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .rng import DESIGN_TAG, NOISE_TAG, substream

DESIGN_KINDS = ("rademacher", "bounded_uniform", "gaussian", "student_t", "symmetrized_pareto")
NOISE_KINDS = ("zero", "scaled_sign", "gaussian", "bounded_symmetric", "heavy_tailed")


@dataclass(frozen=True)
class DesignSpec:
    """Coordinate distribution of the design vector X, standardized to variance 1.

    kind            one of DESIGN_KINDS
    n               dimension of X
    p               tail/moment parameter, required (> 2) for student_t and
                    symmetrized_pareto
    kappa           half-width of the uniform before standardization; the
                    standardized bound is sqrt(3) regardless, since a
                    variance-1 uniform law is pinned up to this rescaling
    """

    kind: str
    n: int
    p: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension n must be positive")
        if self.kind in ("student_t", "symmetrized_pareto"):
            if self.p is None or self.p <= 2:
                raise ValueError(f"{self.kind} requires a moment parameter p > 2")
        if self.kind == "bounded_uniform" and self.kappa is not None and self.kappa <= 0:
            raise ValueError("bounded_uniform kappa must be positive")

    def sample_coords(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw iid standardized coordinates of the given shape."""
        if self.kind == "rademacher":
            return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0
        if self.kind == "bounded_uniform":
            return rng.uniform(-1.0, 1.0, size=size) * math.sqrt(3.0)
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        if self.kind == "student_t":
            return rng.standard_t(self.p, size=size) * math.sqrt((self.p - 2.0) / self.p)
        # symmetrized Pareto with tail index p, scaled to unit variance
        x = 1.0 + rng.pareto(self.p, size=size)
        signs = rng.integers(0, 2, size=size) * 2.0 - 1.0
        return signs * x / math.sqrt(self.p / (self.p - 2.0))

    def linf_bound(self) -> float:
        """Almost-sure bound on a standardized coordinate (inf for unbounded kinds)."""
        if self.kind == "rademacher":
            return 1.0
        if self.kind == "bounded_uniform":
            return math.sqrt(3.0)
        return math.inf

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "n": self.n}
        if self.p is not None:
            rec["p"] = self.p
        if self.kappa is not None:
            rec["kappa"] = self.kappa
        return rec


@dataclass(frozen=True)
class NoiseSpec:
    """Law of the noise W, independent of the design.

    kind ∈ NOISE_KINDS; sigma scales every kind so that ||W||_L2 = sigma
    (for bounded_symmetric, W = sigma*xi with Pr(xi = ±kappa) = 1/(2 kappa^2),
    Pr(xi = 0) = 1 - 1/kappa^2, so the a.s. bound kappa*sigma is a real knob).
    """

    kind: str
    sigma: float = 0.0
    p: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind != "zero" and self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.kind == "heavy_tailed" and (self.p is None or self.p <= 2):
            raise ValueError("heavy_tailed noise requires p > 2 (L_{2,1} diverges otherwise)")
        if self.kind == "bounded_symmetric":
            if self.kappa is None or self.kappa < 1:
                raise ValueError("bounded_symmetric requires kappa >= 1")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "zero" or self.sigma == 0.0:
            return np.zeros(size, dtype=np.float64)
        if self.kind == "scaled_sign":
            return self.sigma * (rng.integers(0, 2, size=size) * 2.0 - 1.0)
        if self.kind == "gaussian":
            return self.sigma * rng.standard_normal(size)
        if self.kind == "bounded_symmetric":
            signs = rng.integers(0, 2, size=size) * 2.0 - 1.0
            hit = rng.random(size=size) < 1.0 / self.kappa**2
            return self.sigma * self.kappa * signs * hit
        # heavy_tailed: symmetrized Pareto scaled to sd sigma
        x = 1.0 + rng.pareto(self.p, size=size)
        signs = rng.integers(0, 2, size=size) * 2.0 - 1.0
        return self.sigma * signs * x / math.sqrt(self.p / (self.p - 2.0))

    def survival(self, t: np.ndarray) -> np.ndarray:
        """Pr(|W| > t), exact for every kind."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "zero" or self.sigma == 0.0:
            return np.zeros_like(t)
        if self.kind == "scaled_sign":
            return (t < self.sigma).astype(np.float64)
        if self.kind == "gaussian":
            return 2.0 * stats.norm.sf(t / self.sigma)
        if self.kind == "bounded_symmetric":
            return np.where(t < self.sigma * self.kappa, 1.0 / self.kappa**2, 0.0)
        a = self.sigma / math.sqrt(self.p / (self.p - 2.0))  # |W| >= a almost surely
        with np.errstate(divide="ignore"):
            tail = np.where(t > 0, (a / np.maximum(t, a)) ** self.p, 1.0)
        return np.where(t < a, 1.0, tail)

    def to_record(self) -> dict:
        rec = {"kind": self.kind, "sigma": self.sigma}
        if self.p is not None:
            rec["p"] = self.p
        if self.kappa is not None:
            rec["kappa"] = self.kappa
        return rec


@dataclass(frozen=True)
class Sample:
    """A realized data set: N design rows plus the N responses."""

    design: np.ndarray
    responses: np.ndarray
    seed: int

    def __post_init__(self):
        if self.design.ndim != 2 or self.responses.ndim != 1:
            raise ValueError("design must be N x n, responses length N")
        if self.design.shape[0] != self.responses.shape[0]:
            raise ValueError("design and responses disagree on N")

    @property
    def N(self) -> int:
        return self.design.shape[0]

    @property
    def n(self) -> int:
        return self.design.shape[1]


def sample_design(spec: DesignSpec, N: int, seed: int, trial: int = 0) -> np.ndarray:
    """N iid rows with iid standardized coordinates, deterministic given (seed, trial)."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = substream(seed, trial, DESIGN_TAG)
    return spec.sample_coords(rng, (N, spec.n))


def sample_response(class_spec, noise: NoiseSpec, design: np.ndarray, seed: int, trial: int = 0) -> np.ndarray:
    """Responses Y_i = <t0, X_i> + W_i with W drawn from its own stream."""
    t0 = np.asarray(class_spec.t0, dtype=np.float64)
    if design.shape[1] != t0.shape[0]:
        raise ValueError("design column count does not match the class dimension")
    rng = substream(seed, trial, NOISE_TAG)
    w = noise.sample(rng, design.shape[0])
    return design @ t0 + w


def make_sample(class_spec, design_spec: DesignSpec, noise: NoiseSpec, N: int, seed: int, trial: int = 0) -> Sample:
    """Draw a full (design, responses) sample for one trial."""
    X = sample_design(design_spec, N, seed, trial)
    Y = sample_response(class_spec, noise, X, seed, trial)
    return Sample(design=X, responses=Y, seed=seed)


def l21_norm(noise: NoiseSpec) -> float:
    """The norm integral_0^inf sqrt(Pr(|W| > t)) dt.

    Piecewise-constant survival functions integrate in closed form; the rest
    go through adaptive quadrature on the continuous part plus an analytic
    tail, with relative error well under 1e-6.
    """
    sigma = noise.sigma
    if noise.kind == "zero" or sigma == 0.0:
        return 0.0
    if noise.kind == "scaled_sign":
        return float(sigma)
    if noise.kind == "bounded_symmetric":
        # survival = 1/kappa^2 on [0, kappa*sigma): integral = sigma exactly
        return float(sigma)
    if noise.kind == "gaussian":
        val, _ = integrate.quad(lambda t: math.sqrt(2.0 * stats.norm.sf(t / sigma)), 0.0, 40.0 * sigma, epsabs=1e-13 * sigma, epsrel=1e-10, limit=200)
        return float(val)
    # heavy_tailed: survival is 1 on [0, a), (a/t)^p after, with a = sigma/sqrt(p/(p-2))
    p = noise.p
    a = sigma / math.sqrt(p / (p - 2.0))
    body = 0.0
    for k in range(6):  # decade-split keeps quad's roundoff in check
        lo, hi = a * 10.0**k, a * 10.0 ** (k + 1)
        seg, _ = integrate.quad(lambda t: (a / t) ** (p / 2.0), lo, hi, epsrel=1e-10, limit=200)
        body += seg
    tail = a * (1e6) ** (1.0 - p / 2.0) * 2.0 / (p - 2.0)
    return float(a + body + tail)


def psi2_norm(samples, tol: float = 1e-9) -> float:
    """Empirical subgaussian norm: the c solving mean(exp(x^2/c^2)) = 2.

    The criterion is strictly decreasing in c, so bisection on the bracket
    [max|x|/sqrt(log 2m), max|x|/sqrt(log 2)] converges; the bracket also
    keeps every exponent below log(2m), so nothing overflows.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 1000:
        raise ValueError("psi2_norm needs at least 1e3 samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    peak = np.abs(x).max()
    if peak == 0.0:
        return 0.0
    x2 = x * x
    m = x.size

    def crit(c):
        return float(np.mean(np.exp(x2 / (c * c)))) - 2.0

    lo = peak / math.sqrt(math.log(2.0 * m))
    hi = peak / math.sqrt(math.log(2.0))
    # crit(lo) >= 0 and crit(hi) <= 0 by construction
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if crit(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CounterexampleSpec:
    """Symmetric variable with Pr(|Z| = 2 sqrt(N)) = 1/N^2 and |Z| = 1 otherwise."""

    N: int

    def __post_init__(self):
        if self.N < 100:
            raise ValueError("the counterexample regime needs N >= 100")

    @property
    def spike(self) -> float:
        return 2.0 * math.sqrt(self.N)

    @property
    def second_moment(self) -> float:
        n = self.N
        return 1.0 + 4.0 / n - 1.0 / n**2

    @property
    def fourth_moment(self) -> float:
        return 17.0 - 1.0 / self.N**2

    def l4_l2_ratio(self) -> float:
        return self.fourth_moment**0.25 / math.sqrt(self.second_moment)


_ATOMIC_BLOCK = 1024  # stream granularity: fixed, so chunking cannot change draws


def sample_counterexample(spec: CounterexampleSpec, trials: int, seed: int, trial_offset: int = 0) -> np.ndarray:
    """(trials, N) matrix of iid draws, streamed in fixed-size trial blocks.

    Block boundaries are pinned to absolute trial indices, so assembling the
    matrix in pieces of any size reproduces the same draws.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    block = _ATOMIC_BLOCK
    out = np.empty((trials, spec.N), dtype=np.float64)
    first_block = trial_offset // block
    last_block = (trial_offset + trials - 1) // block
    for b in range(first_block, last_block + 1):
        rng = substream(seed, b)
        u = rng.random((block, spec.N))
        signs = rng.integers(0, 2, size=(block, spec.N)) * 2.0 - 1.0
        z = signs * np.where(u < 1.0 / spec.N**2, spec.spike, 1.0)
        lo = max(b * block, trial_offset)
        hi = min((b + 1) * block, trial_offset + trials)
        out[lo - trial_offset : hi - trial_offset] = z[lo - b * block : hi - b * block]
    return out
