"""Sweep harness, summaries, and curve fits."""

import math

import numpy as np
import pytest

from ngrc import experiments
from ngrc.experiments import (
    ExperimentRecord,
    RECORD_COLUMNS,
    apply_scale,
    fit_correlation_decay,
    fit_exponential_rate,
    load_sweep_spec,
    packaged_spec_path,
    records_from_csv,
    records_to_csv,
    run_sweep,
    summarize,
)


def tiny_spec(**overrides) -> experiments.SweepSpec:
    data = {
        "figure_id": "F1_attractor",
        "system": "lorenz63",
        "integrator": "euler",
        "grid": {"h": [0.01], "n_train": [200], "k": [1], "tau": [1], "p": [2], "beta": [0.0]},
        "seeds": 2,
        "n_test": 300,
        "solvers": ["svd"],
        "test_phase": True,
        "n_transient": 500,
    }
    data.update(overrides)
    return load_sweep_spec(data)


class TestSweep:
    def test_one_row_per_point_seed_solver(self):
        spec = tiny_spec(solvers="all")
        records = run_sweep(spec)
        assert len(records) == 2 * 3
        assert [r.solver for r in records[:3]] == ["cholesky", "svd", "lu"]
        assert all(r.status == "ok" for r in records)

    def test_skipped_rows_are_first_class(self):
        spec = tiny_spec(grid={"h": [0.01], "n_train": [5], "k": [1], "tau": [1], "p": [2], "beta": [0.0]})
        records = run_sweep(spec)
        assert all(r.status.startswith("skipped") for r in records)
        assert all(r.kappa is None for r in records)

    def test_reproducible_byte_identical_csv(self, tmp_path):
        spec = tiny_spec()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        records_to_csv(run_sweep(spec), a)
        records_to_csv(run_sweep(spec), b)
        assert a.read_bytes() == b.read_bytes()

    def test_worker_pool_preserves_order(self):
        spec = tiny_spec(seeds=4)
        serial = run_sweep(spec, workers=1)
        threaded = run_sweep(spec, workers=4)
        assert [(r.seed, r.solver) for r in serial] == [(r.seed, r.solver) for r in threaded]
        np.testing.assert_allclose(
            [r.kappa for r in serial], [r.kappa for r in threaded], rtol=1e-12
        )

    def test_csv_round_trip(self, tmp_path):
        spec = tiny_spec()
        records = run_sweep(spec)
        path = tmp_path / "records.csv"
        records_to_csv(records, path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(RECORD_COLUMNS)
        back = records_from_csv(path)
        assert len(back) == len(records)
        assert back[0].kappa == pytest.approx(records[0].kappa)
        assert back[0].bounded == records[0].bounded

    def test_train_only_sweep_leaves_metrics_empty(self):
        spec = tiny_spec(test_phase=False, n_test=0)
        records = run_sweep(spec)
        assert all(r.vpt is None and r.bounded is None for r in records)
        assert all(r.kappa is not None for r in records)

    def test_apply_scale(self):
        spec = tiny_spec(seeds=10, n_test=1000)
        scaled = apply_scale(spec, 5)
        assert scaled.seeds == [0, 1]
        assert scaled.n_test == 200


class TestSummarize:
    @staticmethod
    def record(seed, value, bounded=True):
        return ExperimentRecord(
            figure_id="X",
            seed=seed,
            k=1,
            tau=1,
            p=2,
            beta=0.0,
            h=0.01,
            n_train=100,
            solver="svd",
            kappa=value,
            vpt=value,
            bounded=bounded,
        )

    def test_single_record_quantiles_collapse(self):
        rows = summarize([self.record(0, 5.0)])
        kappa_row = next(r for r in rows if r["metric"] == "kappa")
        assert kappa_row["median"] == kappa_row["q25"] == kappa_row["q75"] == 5.0

    def test_linear_interpolation_convention(self):
        rows = summarize([self.record(s, v) for s, v in enumerate((1.0, 2.0, 3.0))])
        kappa_row = next(r for r in rows if r["metric"] == "kappa")
        assert kappa_row["median"] == 2.0
        assert kappa_row["q25"] == 1.5
        assert kappa_row["q75"] == 2.5

    def test_test_metrics_restricted_to_bounded(self):
        records = [
            self.record(0, 1.0, bounded=True),
            self.record(1, 100.0, bounded=False),
        ]
        records[1].vpt = -1.0
        rows = summarize(records)
        vpt_row = next(r for r in rows if r["metric"] == "vpt")
        assert vpt_row["median"] == 1.0
        assert vpt_row["bounded_fraction"] == 0.5
        kappa_row = next(r for r in rows if r["metric"] == "kappa")
        assert kappa_row["median"] == pytest.approx(50.5)


class TestExponentialFit:
    def test_exact_exponential(self):
        xs = np.arange(1, 9, dtype=float)
        rate, intercept = fit_exponential_rate(xs, np.exp(3.0 * xs))
        assert rate == pytest.approx(3.0, abs=1e-9)
        assert intercept == pytest.approx(0.0, abs=1e-9)

    def test_constant_series_rate_zero(self):
        rate, _ = fit_exponential_rate([1, 2, 3, 4], [7.0, 7.0, 7.0, 7.0])
        assert rate == pytest.approx(0.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            fit_exponential_rate([1, 2], [1.0, 2.0])
        with pytest.raises(ValueError):
            fit_exponential_rate([1, 2, 3], [1.0, -2.0, 3.0])
        with pytest.raises(ValueError):
            fit_exponential_rate([2, 2, 2], [1.0, 2.0, 3.0])


class TestCorrelationDecayFit:
    def test_round_trip_recovery(self):
        taus = np.array([1, 2, 5, 10, 20, 50, 100], dtype=float)
        core = 1.01 * np.exp(-0.01 * taus)
        kappas = np.sqrt((1 + core) / (1 - core))
        fit = fit_correlation_decay(taus, kappas)
        assert fit is not None
        assert fit.K == pytest.approx(1.01, rel=0.1)
        assert fit.gamma == pytest.approx(0.01, rel=0.1)
        assert fit.residual_rms <= 1e-6 * np.sqrt(np.mean(kappas**2))

    def test_constant_kappa_one_gives_small_k(self):
        fit = fit_correlation_decay([1, 5, 10, 50], [1.0, 1.0, 1.0, 1.0])
        assert fit is not None
        assert fit.K <= 0.05

    def test_rejects_kappa_below_one(self):
        with pytest.raises(ValueError):
            fit_correlation_decay([1, 2, 3], [0.5, 1.0, 1.0])


class TestSpecs:
    def test_all_figure_ids_have_packaged_specs(self):
        for figure_id in experiments.FIGURE_IDS:
            spec = load_sweep_spec(packaged_spec_path(figure_id))
            assert spec.figure_id == figure_id
            assert spec.seeds
            for block in spec.blocks:
                assert block.h and block.n_train and block.k and block.tau

    def test_unknown_figure_id_lists_valid_ids(self):
        with pytest.raises(KeyError, match="F5_degree_growth"):
            packaged_spec_path("F99_bogus")

    def test_grid_points_satisfy_length_invariant(self):
        # Every checked-in grid point is runnable: n_train above the basis size.
        for figure_id in experiments.FIGURE_IDS:
            spec = load_sweep_spec(packaged_spec_path(figure_id))
            for block in spec.blocks:
                for h, n_train, k, tau, p, beta in block.points():
                    assert n_train > math.comb(k * spec.d + p, p), (figure_id, k, p, n_train)


class TestWriteOutputs:
    def test_outputs_and_manifest(self, tmp_path):
        spec = tiny_spec(aux=["trajectories"])
        records = run_sweep(spec)
        manifest = experiments.write_outputs(spec, records, tmp_path)
        assert (tmp_path / "records.csv").exists()
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "manifest.json").exists()
        assert (tmp_path / "truth.csv").exists()
        assert (tmp_path / "pred.csv").exists()
        assert manifest["figure_id"] == "F1_attractor"
        assert "truth.csv" in manifest["files"]

    def test_reproduce_at_scale_is_deterministic(self, tmp_path):
        experiments.reproduce("F5_degree_growth", tmp_path / "a", scale=10)
        experiments.reproduce("F5_degree_growth", tmp_path / "b", scale=10)
        assert (tmp_path / "a" / "records.csv").read_bytes() == (
            tmp_path / "b" / "records.csv"
        ).read_bytes()
        assert (tmp_path / "a" / "summary.csv").read_bytes() == (
            tmp_path / "b" / "summary.csv"
        ).read_bytes()
