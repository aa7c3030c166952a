import math

import numpy as np
import pytest

from ermbounds.distributions import DesignSpec, sample_design
from ermbounds.erm import ClassSpec
from ermbounds.fixed_points import beta_star
from ermbounds.smallball import choose_tau
from ermbounds.versionspace import max_step_l1, nullspace_basis, version_diameter


def cls_zero(n, R=1.0):
    return ClassSpec(n=n, R=R, t0=np.zeros(n))


class TestVersionDiameter:
    def test_full_rank_design(self):
        X = sample_design(DesignSpec("gaussian", 5), 12, seed=1)
        probe = version_diameter(X, cls_zero(5), probes=200, seed=1)
        assert probe.nullspace_dim == 0
        assert probe.radius_lb == 0.0

    def test_no_constraints(self):
        # empty sample: the whole ball is the version space; the farthest
        # points from 0 are the vertices +-R e_i, hit by the basis probes
        probe = version_diameter(np.zeros((0, 4)), cls_zero(4, R=1.5), probes=50, seed=2)
        assert probe.nullspace_dim == 4
        assert probe.radius_lb == pytest.approx(1.5, rel=1e-9)

    def test_angular_grid_oracle(self):
        # 2-dimensional null space: exhaustively scan directions by angle
        X = sample_design(DesignSpec("gaussian", 3), 1, seed=3)
        cls = cls_zero(3)
        probe = version_diameter(X, cls, probes=4000, seed=3)
        basis = nullspace_basis(X)
        assert basis.shape == (3, 2)
        best = 0.0
        for theta in np.linspace(0.0, 2.0 * math.pi, 20000, endpoint=False):
            u = math.cos(theta) * basis[:, 0] + math.sin(theta) * basis[:, 1]
            best = max(best, max_step_l1(cls.t0, u, cls.R))
        assert probe.radius_lb == pytest.approx(best, abs=1e-3)

    def test_monotone_in_N(self):
        spec = DesignSpec("gaussian", 6)
        cls = cls_zero(6)
        X_full = sample_design(spec, 5, seed=4)
        values = []
        for N in (1, 2, 3, 4, 5):
            probe = version_diameter(X_full[:N], cls, probes=3000, seed=5)
            values.append(probe.radius_lb)
        assert all(b <= a * (1.0 + 1e-9) for a, b in zip(values, values[1:]))

    def test_feasibility_of_witness(self):
        rng = np.random.default_rng(6)
        for seed in range(15):
            n = int(rng.integers(3, 10))
            N = int(rng.integers(1, n))
            t0 = rng.standard_normal(n)
            t0 *= 0.6 / np.abs(t0).sum()
            cls = ClassSpec(n=n, R=1.0, t0=t0)
            X = sample_design(DesignSpec("gaussian", n), N, seed=seed)
            probe = version_diameter(X, cls, probes=300, seed=seed)
            assert np.abs(probe.witness).sum() <= cls.R * (1.0 + 1e-10)
            scale = np.abs(X).max()
            assert np.abs(X @ (probe.witness - t0)).max() <= 1e-8 * scale

    def test_boundary_t0(self):
        # t0 on the l1 sphere: stepping away is only possible along
        # directions that trade mass, and the probe must stay feasible
        cls = ClassSpec(n=4, R=1.0, t0=np.array([1.0, 0.0, 0.0, 0.0]))
        X = sample_design(DesignSpec("gaussian", 4), 1, seed=7)
        probe = version_diameter(X, cls, probes=500, seed=7)
        assert np.abs(probe.witness).sum() <= 1.0 + 1e-10
        assert probe.radius_lb <= 2.0


class TestBetaDomination:
    def test_radius_below_beta(self):
        # the version space cannot extend past the fixed point (checked
        # statistically at the level induced by the small-ball estimate)
        design = DesignSpec("gaussian", 16)
        cls = cls_zero(16)
        choice = choose_tau(design, directions=100, draws=10000, seed=8)
        hits = 0
        trials = 20
        for trial in range(trials):
            N = (16, 64)[trial % 2]
            beta = beta_star(cls, design, N, choice.gamma_beta, trials=60, seed=100 + trial)
            X = sample_design(design, N, seed=200 + trial)
            probe = version_diameter(X, cls, probes=400, seed=trial)
            width = beta.upper_bracket - beta.lower_bracket
            if probe.radius_lb <= beta.value + 2.0 * width:
                hits += 1
        assert hits >= 0.9 * trials
