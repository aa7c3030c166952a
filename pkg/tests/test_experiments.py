import json

import numpy as np
import pytest

from ermbounds.distributions import DesignSpec, NoiseSpec
from ermbounds.experiments import MainTheoremConfig, SweepConfig, make_t0, run_counterexample, run_persistence_sweep, verify_main_theorem
from ermbounds.reports import Report, canonical_json, emit_report, wilson_interval


class TestMakeT0:
    def test_shapes(self):
        assert np.array_equal(make_t0("zero", 0.0, 4, 1.0), np.zeros(4))
        spike = make_t0("spike", 0.5, 4, 2.0)
        assert spike[0] == 1.0 and np.abs(spike).sum() == 1.0
        flat = make_t0("flat", 1.0, 4, 2.0)
        assert np.allclose(flat, 0.5)
        with pytest.raises(ValueError):
            make_t0("blob", 0.5, 4, 1.0)
        with pytest.raises(ValueError):
            make_t0("spike", 1.5, 4, 1.0)


class TestCounterexample:
    def test_probabilities_and_moment(self):
        N = 100
        rep = run_counterexample(N, 30000, seed=0x5EED)
        s = rep.summary
        # a single spike spoils the two-sided inequality: probability ~ 1/N
        assert s["deviation_probability"] >= 1.0 / (4.0 * N)
        # the one-sided lower bound fails exponentially rarely (here never,
        # since |Z| >= 1 pointwise)
        assert s["onesided_failure_probability"] <= 1e-3
        assert s["empirical_EZ2"] == pytest.approx(s["analytic_EZ2"], rel=0.01)
        stats = {r["statistic"]: r for r in rep.rows}
        assert stats["deviation_probability"]["ci_low"] <= s["deviation_probability"] <= stats["deviation_probability"]["ci_high"]

    def test_block_chunking_invariant(self):
        a = run_counterexample(100, 5000, seed=3, block=512)
        b = run_counterexample(100, 5000, seed=3, block=4096)
        assert a.to_csv() == b.to_csv()


class TestPersistenceSweep:
    def test_noise_monotonicity(self):
        cfg = SweepConfig(design_kind="rademacher", noise_kind="gaussian", n_grid=(16,), N_grid=(64,), sigma_grid=(0.1, 0.5, 1.0), trials=20, seed=5, t0_shape="zero", t0_fraction=0.0)
        rep = run_persistence_sweep(cfg)
        meds = [r["value"] for r in rep.rows if r["statistic"] == "median_err2"]
        assert all(a <= b for a, b in zip(meds, meds[1:]))

    def test_regime_separation(self):
        # straddling the branch threshold N = n^2 sigma^2 / R^2 = 4096 the
        # fitted slope must move by at least 0.3 between branches
        cfg = SweepConfig(design_kind="rademacher", noise_kind="gaussian", n_grid=(64,), N_grid=(256, 512, 1024, 2048, 4096, 8192, 16384), sigma_grid=(1.0,), trials=20, seed=11, t0_shape="zero", t0_fraction=0.0)
        rep = run_persistence_sweep(cfg)
        slopes = rep.summary["slopes"]
        s1 = slopes["n=64,R=1,sigma=1,branch2=0"]
        s2 = slopes["n=64,R=1,sigma=1,branch2=1"]
        assert abs(s2 - s1) >= 0.3

    def test_worker_count_never_changes_bytes(self):
        base = dict(design_kind="gaussian", noise_kind="gaussian", n_grid=(8,), N_grid=(32, 64), sigma_grid=(0.5,), trials=20, seed=9, t0_shape="spike", t0_fraction=0.5)
        rep1 = run_persistence_sweep(SweepConfig(**base, workers=1))
        rep4 = run_persistence_sweep(SweepConfig(**base, workers=4))
        assert rep1.to_csv() == rep4.to_csv()
        assert rep1.to_json() == rep4.to_json()

    def test_seed_changes_results(self):
        base = dict(design_kind="gaussian", noise_kind="gaussian", n_grid=(8,), N_grid=(32,), sigma_grid=(0.5,), trials=20, t0_shape="zero", t0_fraction=0.0)
        rep1 = run_persistence_sweep(SweepConfig(**base, seed=1))
        rep2 = run_persistence_sweep(SweepConfig(**base, seed=2))
        assert rep1.to_csv() != rep2.to_csv()

    def test_solver_failure_flagging(self):
        cfg = SweepConfig(design_kind="gaussian", noise_kind="gaussian", n_grid=(8,), N_grid=(32,), sigma_grid=(0.5,), trials=20, seed=5, tol=1e-15, max_iter=2, t0_shape="zero", t0_fraction=0.0)
        rep = run_persistence_sweep(cfg)
        flagged = [r["value"] for r in rep.rows if r["statistic"] == "flagged"]
        assert flagged == [True]


class TestVerifyMain:
    def test_mini_run_structure(self):
        cfg = MainTheoremConfig(
            design=DesignSpec("gaussian", 8),
            noise=NoiseSpec("gaussian", sigma=0.5),
            N=64,
            delta=0.2,
            trials=30,
            alpha_trials=1000,
            beta_trials=50,
            tau_directions=50,
            tau_draws=2000,
            seed=21,
        )
        rep = verify_main_theorem(cfg)
        s = rep.summary
        assert 0.0 <= s["frequency"] <= 1.0
        assert s["bound"] == pytest.approx(2.0 * max(s["alpha"]["value"], s["beta"]["value"]), rel=1e-15)
        stats = {r["statistic"] for r in rep.rows}
        assert {"tau", "q_hat", "gamma", "alpha_hat", "beta_hat", "bound", "frequency", "criterion"} <= stats
        assert isinstance(s["passed"], bool)


class TestReports:
    def test_empty_report_header_only(self, tmp_path):
        rep = Report(kind="t", config={}, columns=("a", "b"))
        path = tmp_path / "empty.csv"
        emit_report(rep, path, "csv")
        assert path.read_text() == "a,b\n"

    def test_unknown_row_field_rejected(self):
        rep = Report(kind="t", config={}, columns=("a",))
        with pytest.raises(ValueError):
            rep.add_row(a=1, b=2)

    def test_float_17_digits(self, tmp_path):
        rep = Report(kind="t", config={}, columns=("x",))
        rep.add_row(x=1.0 / 3.0)
        path = tmp_path / "f.csv"
        emit_report(rep, path, "csv")
        assert path.read_text() == "x\n0.33333333333333331\n"

    def test_json_round_trip_byte_identical(self):
        rep = run_counterexample(100, 2000, seed=7)
        text = rep.to_json()
        parsed = json.loads(text)
        assert canonical_json(parsed) + "\n" == text

    def test_bad_format(self, tmp_path):
        rep = Report(kind="t", config={}, columns=("a",))
        with pytest.raises(ValueError):
            emit_report(rep, tmp_path / "x", "yaml")

    def test_io_error_has_path(self):
        rep = Report(kind="t", config={}, columns=("a",))
        with pytest.raises(OSError, match="/nonexistent/dir/x.csv"):
            emit_report(rep, "/nonexistent/dir/x.csv", "csv")

    def test_wilson_interval(self):
        lo, hi = wilson_interval(90, 100)
        assert 0.82 < lo < 0.9 < hi < 0.95
        assert wilson_interval(0, 10)[0] == 0.0

    def test_golden_counterexample(self, tmp_path):
        # frozen after the first verified run; byte-level regression guard
        rep = run_counterexample(100, 2000, seed=0x5EED)
        import pathlib

        golden_dir = pathlib.Path(__file__).parent / "golden"
        assert rep.to_csv() == (golden_dir / "counterexample_small.csv").read_text()
        assert rep.to_json() == (golden_dir / "counterexample_small.json").read_text()
