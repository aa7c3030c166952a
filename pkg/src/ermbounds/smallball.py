"""Small-ball estimation and moment-equivalence diagnostics.

For l1-ball linear classes the difference class consists of linear
functionals, so by homogeneity every small-ball infimum runs over unit
directions. The infimum over infinitely many directions is approximated by
random sphere directions augmented with canonical and 2-sparse ones, which
are the worst cases for product measures. This is a heuristic lower-bound
estimator for the true infimum: it can only overestimate it, and the result
carries a flag whenever the structured directions strictly undercut the
random ones.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DesignSpec, sample_design
from .erm import ClassSpec
from .rng import DIRECTIONS_TAG, substream


@dataclass(frozen=True)
class SmallBallEstimate:
    u: float
    q_hat: float
    directions: int
    draws: int
    stderr: float
    argmin_direction: np.ndarray
    flags: tuple = field(default_factory=tuple)

    def to_record(self) -> dict:
        return {
            "u": self.u,
            "q_hat": self.q_hat,
            "directions": self.directions,
            "draws": self.draws,
            "stderr": self.stderr,
            "flags": list(self.flags),
        }


def probe_directions(design: DesignSpec, count: int, seed: int, max_pairs: int = 2048) -> tuple[np.ndarray, int]:
    """Unit probe directions: `count` random ones plus canonical and 2-sparse ones.

    Returns the stacked directions and the number of random rows (the
    structured rows follow them).
    """
    n = design.n
    rng = substream(seed, DIRECTIONS_TAG)
    raw = rng.standard_normal((count, n))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    structured = [np.eye(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) > max_pairs:
        idx = rng.choice(len(pairs), size=max_pairs, replace=False)
        pairs = [pairs[k] for k in np.sort(idx)]
    if pairs:
        plus = np.zeros((len(pairs), n))
        minus = np.zeros((len(pairs), n))
        for row, (i, j) in enumerate(pairs):
            plus[row, i] = plus[row, j] = 1.0 / math.sqrt(2.0)
            minus[row, i] = 1.0 / math.sqrt(2.0)
            minus[row, j] = -1.0 / math.sqrt(2.0)
        structured += [plus, minus]
    return np.vstack([raw] + structured), count


def direction_probability(design: DesignSpec, direction: np.ndarray, u: float, draws: int, seed: int, trial: int = 101) -> float:
    """Empirical Pr(|<X, t>| >= u ||<X, t>||_L2) for a single direction.

    The probe is normalized internally, so the probability only depends on
    the direction of t (isotropy gives ||<X, t>||_L2 = ||t||_2).
    """
    t = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(t)
    if norm == 0.0:
        raise ValueError("direction must be nonzero")
    rng = substream(seed, trial, DIRECTIONS_TAG)
    X = design.sample_coords(rng, (draws, design.n))
    return float(np.mean(np.abs(X @ (t / norm)) >= u))


def estimate_Q(design: DesignSpec, u: float, directions: int = 500, draws: int = 10000, seed: int = 0) -> SmallBallEstimate:
    """Estimate inf over unit directions t of Pr(|<X, t>| >= u).

    Two passes over independent draw sets: the first selects the worst
    direction, the second re-estimates its probability, so the reported value
    is an unbiased binomial estimate of the selected direction's probability
    rather than a minimum dragged down by selection noise. Isotropy makes
    ||<X, t>||_L2 = 1 for unit t, so u is used as an absolute threshold.
    """
    if u < 0:
        raise ValueError("u must be nonnegative")
    if draws < 1000:
        raise ValueError("need at least 1e3 draws per direction for quantile resolution")
    if u == 0.0:
        e1 = np.zeros(design.n)
        e1[0] = 1.0
        return SmallBallEstimate(0.0, 1.0, directions, draws, 0.0, e1)

    T, n_random = probe_directions(design, directions, seed)
    rng_sel = substream(seed, DIRECTIONS_TAG, 0)
    X = design.sample_coords(rng_sel, (draws, design.n))
    probs = np.mean(np.abs(X @ T.T) >= u, axis=0)
    worst = int(np.argmin(probs))

    rng_est = substream(seed, DIRECTIONS_TAG, 1)
    X2 = design.sample_coords(rng_est, (draws, design.n))
    q_hat = float(np.mean(np.abs(X2 @ T[worst]) >= u))
    stderr = math.sqrt(max(q_hat * (1.0 - q_hat), 0.0) / draws)

    flags = []
    if probs[n_random:].size and probs[:n_random].size:
        if probs[n_random:].min() < probs[:n_random].min():
            flags.append("structured_below_random")
    return SmallBallEstimate(u, q_hat, T.shape[0], draws, stderr, T[worst].copy(), tuple(flags))


def paley_zygmund_Q(kappa2: float, p: float, u: float) -> float:
    """Small-ball lower bound ((1 - u^2)/kappa2^2)^(p/(p-2)) from an Lp/L2 ratio."""
    if p <= 2:
        raise ValueError("p must exceed 2")
    if kappa2 < 1:
        raise ValueError("kappa2 must be at least 1")
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie in (0, 1)")
    return ((1.0 - u * u) / kappa2**2) ** (p / (p - 2.0))


def moment_ratio_p2(design: DesignSpec, p: float, directions: int = 200, draws: int = 100000, seed: int = 0) -> float:
    """Max over probed directions of the empirical Lp/L2 ratio of <X, t>."""
    if p < 2:
        raise ValueError("p must be at least 2")
    T, _ = probe_directions(design, directions, seed)
    rng = substream(seed, DIRECTIONS_TAG, 2)
    X = design.sample_coords(rng, (draws, design.n))
    proj = np.abs(X @ T.T)
    lp = np.mean(proj**p, axis=0) ** (1.0 / p)
    l2 = np.sqrt(np.mean(proj**2, axis=0))
    return float(np.max(lp / l2))


def l2_l1_ratio(design: DesignSpec, directions: int = 200, draws: int = 100000, seed: int = 0) -> float:
    """Max over probed directions of the empirical L2/L1 ratio of <X, t>."""
    T, _ = probe_directions(design, directions, seed)
    rng = substream(seed, DIRECTIONS_TAG, 3)
    X = design.sample_coords(rng, (draws, design.n))
    proj = np.abs(X @ T.T)
    l2 = np.sqrt(np.mean(proj**2, axis=0))
    l1 = np.mean(proj, axis=0)
    return float(np.max(l2 / l1))


@dataclass(frozen=True)
class TauChoice:
    tau: float
    q_at_2tau: float
    gamma: float
    gamma_beta: float
    grid: tuple
    flags: tuple = field(default_factory=tuple)

    def to_record(self) -> dict:
        return {
            "tau": self.tau,
            "q_at_2tau": self.q_at_2tau,
            "gamma": self.gamma,
            "gamma_beta": self.gamma_beta,
            "flags": list(self.flags),
        }


def default_tau_grid(points: int = 20, lo: float = 0.05, hi: float = 1.0) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def choose_tau(design: DesignSpec, tau_grid=None, directions: int = 500, draws: int = 10000, seed: int = 0) -> TauChoice:
    """Maximize tau^2 * Q_hat(2 tau) over the grid.

    Returns the argmax tau, its Q estimate, the induced multiplier-process
    level gamma = tau^2 Q_hat(2 tau)/16 and the quadratic-process level
    gamma_beta = tau Q_hat(2 tau)/16.
    """
    grid = default_tau_grid() if tau_grid is None else np.asarray(tau_grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("tau grid must be nonempty")
    qs = np.array([estimate_Q(design, 2.0 * float(t), directions, draws, seed).q_hat for t in grid])
    scores = grid**2 * qs
    best = int(np.argmax(scores))
    flags = ()
    if np.all(qs == 0.0):
        flags = ("small_ball_not_detectable",)
    tau = float(grid[best])
    q = float(qs[best])
    return TauChoice(tau, q, tau * tau * q / 16.0, tau * q / 16.0, tuple(float(t) for t in grid), flags)


@dataclass(frozen=True)
class SmallBallCountReport:
    """Per-trial minimum counts against the theoretical count threshold."""

    tau: float
    r: float
    N: int
    q_hat: float
    count_threshold: float
    success_fraction: float
    success_criterion: float
    passed: bool
    hypothesis_certified: bool
    min_counts: np.ndarray
    flags: tuple = field(default_factory=tuple)

    def to_record(self) -> dict:
        return {
            "tau": self.tau,
            "r": self.r,
            "N": self.N,
            "q_hat": self.q_hat,
            "count_threshold": self.count_threshold,
            "success_fraction": self.success_fraction,
            "success_criterion": self.success_criterion,
            "passed": self.passed,
            "hypothesis_certified": self.hypothesis_certified,
            "flags": list(self.flags),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "min_count", "threshold", "pass"])
            for i, count in enumerate(self.min_counts):
                writer.writerow([i, int(count), f"{self.count_threshold:.17g}", int(count >= self.count_threshold)])


def verify_empirical_smallball(design: DesignSpec, class_spec: ClassSpec, tau: float, r: float, N: int, trials: int = 50, probes: int = 100, seed: int = 0, q_hat: float | None = None, beta_estimate=None, csv_path=None) -> SmallBallCountReport:
    """Statistical test of the uniform empirical small-ball count property.

    Per trial, draws a fresh design sample and probes functions h = <v, .>
    with ||v||_2 >= r and v feasible for the symmetric difference set
    2R*B1; records the minimum over probes of
    |{i : |h(X_i)| >= tau ||h||_L2}| and checks it against N*Q_hat(2 tau)/4.
    The count criterion is scale invariant, so probes are random directions
    (plus canonical ones) scaled to the feasible range [r, 2R/||w||_1].
    Whether the sufficient condition r > beta_hat could be certified is
    reported alongside; the count test itself runs either way.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if r > 2.0 * class_spec.R * (1.0 + 1e-12):
        raise ValueError("r exceeds the diameter of the difference class")
    if q_hat is None:
        q_hat = estimate_Q(design, 2.0 * tau, seed=seed).q_hat
    threshold = N * q_hat / 4.0
    n = design.n

    rng_dir = substream(seed, DIRECTIONS_TAG, 7)
    dirs = rng_dir.standard_normal((max(probes, 100), n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, np.eye(n)])
    # scale each direction to the smallest feasible norm >= r (the count
    # criterion below is invariant to this scale; feasibility is what matters)
    l1 = np.abs(dirs).sum(axis=1)
    cap = 2.0 * class_spec.R / l1
    feasible = cap >= r
    if not feasible.any():
        raise ValueError("no probe direction admits ||v||_2 >= r inside 2R*B1")
    dirs = dirs[feasible]

    min_counts = np.empty(trials)
    for j in range(trials):
        X = np.asarray(sample_design(design, N, seed, trial=j))
        proj = np.abs(X @ dirs.T)  # |h(X_i)| for unit-scaled h; threshold scales the same way
        counts = (proj >= tau).sum(axis=0)
        min_counts[j] = counts.min()
    success_fraction = float(np.mean(min_counts >= threshold))
    criterion = 1.0 - 2.0 * math.exp(-N * q_hat**2 / 2.0) - 0.05

    hypothesis_ok = False
    flags = []
    if beta_estimate is not None:
        hypothesis_ok = (r > beta_estimate.value) and ("not_satisfied_within_upper" not in beta_estimate.flags)
        if not hypothesis_ok:
            flags.append("beta_hypothesis_not_certified")
    else:
        flags.append("beta_hypothesis_not_checked")
    report = SmallBallCountReport(
        tau=tau,
        r=r,
        N=N,
        q_hat=q_hat,
        count_threshold=threshold,
        success_fraction=success_fraction,
        success_criterion=criterion,
        passed=success_fraction >= criterion,
        hypothesis_certified=hypothesis_ok,
        min_counts=min_counts,
        flags=tuple(flags),
    )
    if csv_path is not None:
        report.write_csv(csv_path)
    return report
