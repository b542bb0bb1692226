"""Power-law fitting, job reproducibility, and study plumbing at toy scale."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kanlab.experiments import (ExperimentRecord, TrainJob, _sub_seed,
                                fit_power_law, run_job, run_jobs,
                                run_noise_table, run_oversampling,
                                starts_for_shape, write_records_csv,
                                write_table_csv, write_timings_csv)

TOY = dict(steps=30, n_test=50)


class TestFitPowerLaw:
    def test_exact_inverse_square_root(self):
        rs = np.array([5, 8, 12, 18, 25], dtype=float)
        fit = fit_power_law(list(zip(rs, 3.0 * rs ** -0.5)), r_min=5)
        assert abs(fit.exponent + 0.5) < 1e-12
        assert fit.amplitude == pytest.approx(3.0, rel=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        rs = [5.0, 10.0, 15.0, 20.0]
        fit = fit_power_law([(r, 0.7) for r in rs], r_min=5)
        assert abs(fit.exponent) < 1e-12
        assert fit.r2 == pytest.approx(1.0)

    def test_only_tail_is_used(self):
        series = [(1, 100.0), (2, 100.0)] + [(r, 2.0 * r ** -0.5)
                                             for r in (5, 9, 14, 25)]
        fit = fit_power_law(series, r_min=5)
        assert abs(fit.exponent + 0.5) < 1e-12

    def test_insufficient_points(self):
        with pytest.raises(ValueError):
            fit_power_law([(5, 1.0), (6, 0.9), (7, 0.8)], r_min=5)

    def test_nonpositive_rmse(self):
        with pytest.raises(ValueError):
            fit_power_law([(5, 1.0), (6, 0.0), (7, 0.8), (8, 0.7)], r_min=5)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.01, 100.0))
    def test_rescaling_only_moves_amplitude(self, scale):
        rs = np.array([5, 7, 11, 16, 25], dtype=float)
        vals = 2.0 * rs ** -0.43
        base = fit_power_law(list(zip(rs, vals)), r_min=5)
        scaled = fit_power_law(list(zip(rs, scale * vals)), r_min=5)
        assert scaled.exponent == pytest.approx(base.exponent, abs=1e-9)
        assert scaled.amplitude == pytest.approx(scale * base.amplitude, rel=1e-9)


class TestSeeds:
    def test_sub_seed_is_stable(self):
        assert _sub_seed(3, 0, 1) == _sub_seed(3, 0, 1)
        assert _sub_seed(3, 0, 1) != _sub_seed(3, 0, 2)
        assert _sub_seed(3, 0, 1) != _sub_seed(4, 0, 1)

    def test_starts_by_depth(self):
        assert starts_for_shape((2, 5, 1)) == 1
        assert starts_for_shape((4, 2, 1, 1)) == 4
        assert starts_for_shape((3, 2, 2, 1)) == 4


class TestRunJob:
    def test_record_fields(self):
        job = TrainJob("f2", (2, 2, 1), n_train=60, seed=0, **TOY)
        rec = run_job(job)
        assert rec.function_id == "f2"
        assert rec.network_shape == (2, 2, 1)
        assert rec.n_train == 60
        assert rec.snr_db is None
        assert rec.oversample_factor == 1.0
        assert rec.test_rmse >= 0
        assert rec.wall_time_s > 0

    def test_deterministic_metrics(self):
        job = TrainJob("f2", (2, 2, 1), n_train=60, seed=1,
                       noise_mode="fixed-sigma", noise_value=0.1, **TOY)
        a, b = run_job(job), run_job(job)
        assert a.test_rmse == b.test_rmse
        assert a.snr_db == b.snr_db

    def test_filtered_job_records_sigma(self):
        job = TrainJob("f2", (2, 2, 1), n_train=60, seed=1,
                       noise_mode="fixed-sigma", noise_value=0.2,
                       filter_sigma=0.2, **TOY)
        rec = run_job(job)
        assert rec.filter_sigma == 0.2

    def test_racing_selects_deterministically(self):
        job = TrainJob("f3", (4, 2, 1, 1), n_train=80, seed=0, n_starts=3,
                       race_steps=10, **TOY)
        a, b = run_job(job), run_job(job)
        assert a.test_rmse == b.test_rmse

    def test_duplicate_mode_tiles_base(self):
        job = TrainJob("f2", (2, 2, 1), n_train=120, seed=0,
                       noise_mode="fixed-sigma", noise_value=0.3,
                       duplicate_base=60, **TOY)
        from kanlab.experiments import _job_dataset
        ds = _job_dataset(job)
        assert ds.n == 120
        assert np.array_equal(ds.inputs[:60], ds.inputs[60:])
        assert not np.array_equal(ds.labels[:60], ds.labels[60:])

    def test_parallel_matches_serial(self):
        jobs = [TrainJob("f2", (2, 2, 1), n_train=50, seed=s, **TOY)
                for s in range(3)]
        serial = run_jobs(jobs, max_workers=1)
        parallel = run_jobs(jobs, max_workers=2)
        assert [r.test_rmse for r in serial] == [r.test_rmse for r in parallel]


class TestStudySmoke:
    def test_noise_table_rows(self):
        rows, records = run_noise_table(functions=("f2",), n_train=50,
                                        sigma_noise=0.3, seeds=range(2),
                                        steps=25, n_test=40, max_workers=1)
        assert len(rows) == 1
        row = rows[0]
        assert row["function_id"] == "f2"
        assert row["noisy_rmse_mean"] > 0
        assert row["degradation_ratio"] == pytest.approx(
            row["noisy_rmse_mean"] / row["clean_rmse_mean"])
        assert len(records) == 4

    def test_oversampling_r_grid_validated(self):
        with pytest.raises(ValueError):
            run_oversampling("f2", r_grid=(2, 1), max_workers=1)
        with pytest.raises(ValueError):
            run_oversampling("f2", r_grid=(1, 2), mode="bootstrap",
                             max_workers=1)

    def test_oversampling_fresh_draws_differ_per_size(self):
        result, records = run_oversampling(
            "f2", n_base=40, r_grid=(1, 2), snr_grid=(10.0,), seeds=range(1),
            steps=20, n_test=30, max_workers=1)
        assert [r["r"] for r in result["rows"]] == [1.0, 2.0]
        assert all(r["rmse_mean"] > 0 for r in result["rows"])
        assert [rec.n_train for rec in records] == [40, 80]


class TestCsvWriters:
    def _records(self):
        return [ExperimentRecord("f2", (2, 5, 1), 0, 100, 4.5, None, 1.0,
                                 0.0123, 1.5),
                ExperimentRecord("f2", (2, 5, 1), 1, 100, None, 0.1, 2.0,
                                 0.0456, 2.5)]

    def test_records_csv_layout_and_determinism(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_records_csv(self._records(), p1)
        write_records_csv(self._records(), p2)
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().strip().splitlines()
        assert lines[0] == ("function_id,network_shape,seed,n_train,snr_db,"
                            "filter_sigma,oversample_factor,test_rmse")
        assert lines[1] == "f2,2-5-1,0,100,4.5,,1.0,0.0123"
        assert lines[2] == "f2,2-5-1,1,100,,0.1,2.0,0.0456"

    def test_timings_csv_separate(self, tmp_path):
        path = tmp_path / "t.csv"
        write_timings_csv(self._records(), path)
        assert "wall_time_s" in path.read_text().splitlines()[0]

    def test_table_csv(self, tmp_path):
        rows = [{"a": 1, "b": 0.5}, {"a": 2, "b": None}]
        path = tmp_path / "table.csv"
        write_table_csv(rows, path)
        assert path.read_bytes() == b"a,b\r\n1,0.5\r\n2,\r\n"
        with pytest.raises(ValueError):
            write_table_csv([], tmp_path / "empty.csv")
