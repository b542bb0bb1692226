"""The four noise studies and the scaling-law fit.

Every study expands into a flat list of training jobs, runs them on a
process pool, and aggregates means over seeds. A job is fully described by
its config, so any record can be reproduced in isolation; aggregation is
keyed, never order-dependent.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import (LabeledDataset, NoiseSpec, add_noise, get_function,
                       sample_dataset, snr_db)
from .filtering import KernelFilterConfig, kernel_filter
from .network import KanSpec, init_network
from .training import TrainConfig, train

DEFAULT_CUTOFF = 1e-12


def _sub_seed(*parts) -> int:
    """Stable, well-mixed seed derived from integer parts."""
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentRecord:
    function_id: str
    network_shape: tuple[int, ...]
    seed: int
    n_train: int
    snr_db: float | None
    filter_sigma: float | None
    oversample_factor: float
    test_rmse: float
    wall_time_s: float


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    amplitude: float
    r2: float
    r_min: float


@dataclass(frozen=True)
class TrainJob:
    """One reproducible (dataset, network, optimizer) run.

    n_starts > 1 races several parameter initializations for `race_steps`
    full-batch steps, keeps the one with the lowest training RMSE, and
    finishes only that one. Networks three or more layers deep occasionally
    fall into a flat high-loss basin straight from a bad draw; racing on the
    training loss (the test set is never consulted) filters those out.
    """

    function_id: str
    shape: tuple[int, ...]
    n_train: int
    seed: int
    noise_mode: str | None = None  # None | "fixed-sigma" | "target-snr"
    noise_value: float = 0.0
    filter_sigma: float | None = None
    filter_cutoff: float = DEFAULT_CUTOFF
    steps: int = 2000
    learning_rate: float = 1e-2
    n_test: int = 1000
    oversample_factor: float = 1.0
    data_stream: int = 0  # distinguishes fresh draws, e.g. per oversampling size
    duplicate_base: int | None = None  # duplication mode: size of the tiled base set
    n_starts: int = 1
    race_steps: int = 500


def starts_for_shape(shape) -> int:
    """Racing starts by depth: deep stacks need basin selection, shallow
    ones never showed it."""
    return 4 if len(shape) > 3 else 1


def _job_dataset(job: TrainJob) -> LabeledDataset:
    fn = get_function(job.function_id)
    if job.duplicate_base is None:
        ds = sample_dataset(fn, job.n_train, _sub_seed(job.seed, job.data_stream, 1))
    else:
        base = sample_dataset(fn, job.duplicate_base,
                              _sub_seed(job.seed, 0, 1))
        reps = job.n_train // job.duplicate_base
        if reps * job.duplicate_base != job.n_train:
            raise ValueError("duplication needs n_train to be a multiple of the base size")
        inputs = np.tile(base.inputs, (reps, 1))
        clean = np.tile(base.clean_labels, reps)
        ds = LabeledDataset(inputs, clean.copy(), clean, seed=base.seed)
    if job.noise_mode is not None:
        ds = add_noise(ds, NoiseSpec(job.noise_mode, job.noise_value),
                       _sub_seed(job.seed, job.data_stream, 2))
    if job.filter_sigma is not None:
        ds = kernel_filter(ds, KernelFilterConfig(job.filter_sigma, job.filter_cutoff))
    return ds


def run_job(job: TrainJob) -> ExperimentRecord:
    t0 = time.perf_counter()
    fn = get_function(job.function_id)
    train_ds = _job_dataset(job)
    test_ds = sample_dataset(fn, job.n_test, _sub_seed(0, 0, 4))
    spec = KanSpec(job.shape)
    if job.n_starts <= 1 or job.race_steps >= job.steps:
        net = init_network(spec, _sub_seed(job.seed, 0, 3))
        cfg = TrainConfig(steps=job.steps, learning_rate=job.learning_rate,
                          seed=job.seed, log_every=job.steps)
        _, report = train(net, train_ds, test_ds, cfg)
    else:
        race_cfg = TrainConfig(steps=job.race_steps,
                               learning_rate=job.learning_rate,
                               seed=job.seed, log_every=job.race_steps)
        raced = [train(init_network(spec, _sub_seed(job.seed, i, 3)),
                       train_ds, test_ds, race_cfg)
                 for i in range(job.n_starts)]
        best = int(np.argmin([rep.train_rmse_curve[-1] for _, rep in raced]))
        rest_cfg = TrainConfig(steps=job.steps - job.race_steps,
                               learning_rate=job.learning_rate,
                               seed=job.seed, log_every=job.steps - job.race_steps)
        _, report = train(raced[best][0], train_ds, test_ds, rest_cfg)
    realized_snr = snr_db(train_ds) if job.noise_mode is not None else None
    return ExperimentRecord(
        function_id=job.function_id,
        network_shape=tuple(job.shape),
        seed=job.seed,
        n_train=job.n_train,
        snr_db=realized_snr,
        filter_sigma=job.filter_sigma,
        oversample_factor=job.oversample_factor,
        test_rmse=report.final_test_rmse,
        wall_time_s=time.perf_counter() - t0,
    )


def run_jobs(jobs: list[TrainJob], max_workers: int | None = None) -> list[ExperimentRecord]:
    """Run jobs on a process pool; results come back in job order."""
    if max_workers == 1 or len(jobs) == 1:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=max_workers) as ex:
        return list(ex.map(run_job, jobs))


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(list(values), dtype=float)
    return float(arr.mean()), float(arr.std())


# ---------------------------------------------------------------------------
# Study 1: noise degradation table
# ---------------------------------------------------------------------------

def run_noise_table(functions=("f1", "f2", "f3"), n_train: int = 3000,
                    sigma_noise: float = 0.2, seeds=range(5), steps: int = 2000,
                    learning_rate: float = 1e-2, n_test: int = 1000,
                    max_workers: int | None = None):
    """Clean vs noisy test RMSE per function, means over seeds."""
    jobs = []
    for fid in functions:
        fn = get_function(fid)
        for seed in seeds:
            common = dict(function_id=fid, shape=fn.default_shape, n_train=n_train,
                          seed=seed, steps=steps, learning_rate=learning_rate,
                          n_test=n_test, n_starts=starts_for_shape(fn.default_shape))
            jobs.append(TrainJob(**common))
            jobs.append(TrainJob(**common, noise_mode="fixed-sigma",
                                 noise_value=sigma_noise))
    records = run_jobs(jobs, max_workers)
    rows = []
    for fid in functions:
        clean = [r for r in records if r.function_id == fid and r.snr_db is None]
        noisy = [r for r in records if r.function_id == fid and r.snr_db is not None]
        mc, sc = _mean_std(r.test_rmse for r in clean)
        mn, sn = _mean_std(r.test_rmse for r in noisy)
        msnr, _ = _mean_std(r.snr_db for r in noisy)
        rows.append({"function_id": fid, "clean_rmse_mean": mc, "clean_rmse_std": sc,
                     "noisy_rmse_mean": mn, "noisy_rmse_std": sn,
                     "snr_db_mean": msnr, "degradation_ratio": mn / mc})
    return rows, records


# ---------------------------------------------------------------------------
# Study 2: filtering crossover vs SNR
# ---------------------------------------------------------------------------

def run_filter_crossover(function_id: str, snr_grid, filter_sigma: float = 0.1,
                         seeds=range(5), n_train: int = 3000, steps: int = 2000,
                         learning_rate: float = 1e-2, n_test: int = 1000,
                         filter_cutoff: float = DEFAULT_CUTOFF,
                         max_workers: int | None = None):
    """Raw-noisy vs kernel-filtered test RMSE across SNR levels.

    The crossover is the first grid SNR at which raw training stops losing
    to filtered training (mean over seeds).
    """
    fn = get_function(function_id)
    snr_grid = list(snr_grid)
    jobs = []
    for snr in snr_grid:
        for seed in seeds:
            common = dict(function_id=function_id, shape=fn.default_shape,
                          n_train=n_train, seed=seed, noise_mode="target-snr",
                          noise_value=snr, steps=steps,
                          learning_rate=learning_rate, n_test=n_test,
                          n_starts=starts_for_shape(fn.default_shape))
            jobs.append(TrainJob(**common))
            jobs.append(TrainJob(**common, filter_sigma=filter_sigma,
                                 filter_cutoff=filter_cutoff))
    records = run_jobs(jobs, max_workers)
    rows = []
    per_seed = {(round(j.noise_value, 9), j.filter_sigma is not None): []
                for j in jobs}
    for job, rec in zip(jobs, records):
        per_seed[(round(job.noise_value, 9), job.filter_sigma is not None)].append(rec)
    crossover = None
    for snr in snr_grid:
        raw_m, raw_s = _mean_std(r.test_rmse for r in per_seed[(round(snr, 9), False)])
        fil_m, fil_s = _mean_std(r.test_rmse for r in per_seed[(round(snr, 9), True)])
        if crossover is None and raw_m <= fil_m:
            crossover = snr
        rows.append({"snr_db": snr, "raw_rmse_mean": raw_m, "raw_rmse_std": raw_s,
                     "filtered_rmse_mean": fil_m, "filtered_rmse_std": fil_s})
    return {"function_id": function_id, "filter_sigma": filter_sigma,
            "crossover_snr_db": crossover, "rows": rows}, records


# ---------------------------------------------------------------------------
# Study 3: bandwidth sweep, best sigma per SNR
# ---------------------------------------------------------------------------

def run_sigma_sweep(function_id: str, sigma_grid, snr_grid, n_train: int = 500,
                    seeds=range(5), steps: int = 2000, learning_rate: float = 1e-2,
                    n_test: int = 1000, filter_cutoff: float = DEFAULT_CUTOFF,
                    max_workers: int | None = None):
    """Mean test RMSE per (filter sigma, SNR) and the best sigma per SNR."""
    fn = get_function(function_id)
    sigma_grid = list(sigma_grid)
    snr_grid = list(snr_grid)
    jobs = [TrainJob(function_id=function_id, shape=fn.default_shape,
                     n_train=n_train, seed=seed, noise_mode="target-snr",
                     noise_value=snr, filter_sigma=sig,
                     filter_cutoff=filter_cutoff, steps=steps,
                     learning_rate=learning_rate, n_test=n_test,
                     n_starts=starts_for_shape(fn.default_shape))
            for snr in snr_grid for sig in sigma_grid for seed in seeds]
    records = run_jobs(jobs, max_workers)
    rows = []
    by_key = {}
    for job, rec in zip(jobs, records):
        by_key.setdefault((round(job.noise_value, 9), round(job.filter_sigma, 12)),
                          []).append(rec.test_rmse)
    argmin_sigma = {}
    for snr in snr_grid:
        curve = []
        for sig in sigma_grid:
            m, s = _mean_std(by_key[(round(snr, 9), round(sig, 12))])
            curve.append(m)
            rows.append({"snr_db": snr, "filter_sigma": sig,
                         "rmse_mean": m, "rmse_std": s})
        argmin_sigma[snr] = sigma_grid[int(np.argmin(curve))]
    return {"function_id": function_id, "n_train": n_train,
            "argmin_sigma": argmin_sigma, "rows": rows}, records


# ---------------------------------------------------------------------------
# Study 4: oversampling scaling law
# ---------------------------------------------------------------------------

def run_oversampling(function_id: str, shape=None, n_base: int = 500,
                     r_grid=(1, 2, 3, 5, 8, 12, 18, 25), snr_grid=(5.0,),
                     seeds=range(5), steps: int = 2000,
                     learning_rate: float = 1e-2, n_test: int = 1000,
                     mode: str = "fresh", max_workers: int | None = None):
    """Test RMSE versus the oversampling factor r at fixed SNR levels.

    mode "fresh" draws r * n_base new points per size; "duplicate" tiles the
    base inputs r times with fresh noise on every copy (ablation only).
    """
    fn = get_function(function_id)
    if shape is None:
        shape = fn.default_shape
    r_grid = list(r_grid)
    if sorted(r_grid) != r_grid or r_grid[0] != 1:
        raise ValueError("r_grid must be increasing and start at 1")
    if mode not in ("fresh", "duplicate"):
        raise ValueError(f"unknown oversampling mode {mode!r}")
    snr_grid = list(snr_grid)
    jobs = []
    for snr in snr_grid:
        for ri, r in enumerate(r_grid):
            for seed in seeds:
                jobs.append(TrainJob(
                    function_id=function_id, shape=tuple(shape),
                    n_train=int(round(r * n_base)), seed=seed,
                    noise_mode="target-snr", noise_value=snr,
                    steps=steps, learning_rate=learning_rate, n_test=n_test,
                    oversample_factor=float(r),
                    data_stream=ri if mode == "fresh" else 0,
                    duplicate_base=n_base if mode == "duplicate" else None,
                    n_starts=starts_for_shape(shape)))
    records = run_jobs(jobs, max_workers)
    by_key = {}
    for job, rec in zip(jobs, records):
        by_key.setdefault((round(job.noise_value, 9), job.oversample_factor),
                          []).append(rec.test_rmse)
    rows = []
    for snr in snr_grid:
        for r in r_grid:
            m, s = _mean_std(by_key[(round(snr, 9), float(r))])
            rows.append({"snr_db": snr, "r": float(r), "rmse_mean": m,
                         "rmse_std": s})
    return {"function_id": function_id, "shape": tuple(shape), "n_base": n_base,
            "mode": mode, "rows": rows}, records


def fit_power_law(series, r_min: float = 5.0) -> PowerLawFit:
    """Least-squares line on (log r, log rmse) over the tail r >= r_min."""
    pts = [(float(r), float(v)) for r, v in series if float(r) >= r_min]
    if len(pts) < 4:
        raise ValueError(f"need >= 4 points with r >= {r_min}, got {len(pts)}")
    if any(v <= 0 for _, v in pts):
        raise ValueError("rmse values must be positive for a log-log fit")
    log_r = np.log([r for r, _ in pts])
    log_v = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(log_r, log_v, 1)
    pred = slope * log_r + intercept
    ss_res = float(np.sum((log_v - pred) ** 2))
    ss_tot = float(np.sum((log_v - log_v.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res < 1e-30 else 1.0 - ss_res / max(ss_tot, 1e-300)
    return PowerLawFit(exponent=float(slope), amplitude=float(np.exp(intercept)),
                       r2=float(r2), r_min=float(r_min))


# ---------------------------------------------------------------------------
# Study 5: combined oversampling + filtering table
# ---------------------------------------------------------------------------

def run_combined_study(functions=("f1", "f2", "f3"),
                       snr_per_fn={"f1": 7.38, "f2": 4.46, "f3": 10.53},
                       r_values=(1, 25, 50), filter_sigma: float = 0.1,
                       n_base: int = 500, seeds=range(5), steps: int = 2000,
                       learning_rate: float = 1e-2, n_test: int = 1000,
                       filter_cutoff: float = DEFAULT_CUTOFF,
                       max_workers: int | None = None):
    """Clean / noisy / filtered / oversampled / oversampled+filtered table.

    r_values must start at 1; each r > 1 contributes a plain oversampled arm
    and an oversampled+filtered arm.
    """
    r_values = list(r_values)
    if r_values[0] != 1:
        raise ValueError("r_values must start at 1 (the baseline size)")
    jobs, tags = [], []
    for fid in functions:
        fn = get_function(fid)
        snr = snr_per_fn[fid]
        for seed in seeds:
            base = dict(function_id=fid, shape=fn.default_shape, seed=seed,
                        steps=steps, learning_rate=learning_rate, n_test=n_test,
                        n_starts=starts_for_shape(fn.default_shape))
            jobs.append(TrainJob(**base, n_train=n_base))
            tags.append((fid, "clean"))
            jobs.append(TrainJob(**base, n_train=n_base, noise_mode="target-snr",
                                 noise_value=snr))
            tags.append((fid, "noisy"))
            jobs.append(TrainJob(**base, n_train=n_base, noise_mode="target-snr",
                                 noise_value=snr, filter_sigma=filter_sigma,
                                 filter_cutoff=filter_cutoff))
            tags.append((fid, "filtered"))
            for ri, r in enumerate(r for r in r_values if r > 1):
                big = dict(base, n_train=int(round(r * n_base)),
                           noise_mode="target-snr", noise_value=snr,
                           oversample_factor=float(r), data_stream=ri + 1)
                jobs.append(TrainJob(**big))
                tags.append((fid, f"oversampled_{r}x"))
                jobs.append(TrainJob(**big, filter_sigma=filter_sigma,
                                     filter_cutoff=filter_cutoff))
                tags.append((fid, f"oversampled_{r}x_filtered"))
    records = run_jobs(jobs, max_workers)
    by_key = {}
    for (fid, arm), rec in zip(tags, records):
        by_key.setdefault((fid, arm), []).append(rec.test_rmse)
    arms = ["clean", "noisy", "filtered"]
    for r in r_values:
        if r > 1:
            arms += [f"oversampled_{r}x", f"oversampled_{r}x_filtered"]
    rows = []
    for fid in functions:
        row = {"function_id": fid, "snr_db": snr_per_fn[fid]}
        for arm in arms:
            m, s = _mean_std(by_key[(fid, arm)])
            row[f"{arm}_rmse_mean"] = m
            row[f"{arm}_rmse_std"] = s
        rows.append(row)
    return rows, records


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

RECORD_COLUMNS = ["function_id", "network_shape", "seed", "n_train", "snr_db",
                  "filter_sigma", "oversample_factor", "test_rmse"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_records_csv(records: list[ExperimentRecord], path) -> None:
    """Per-run records. Wall times go to a sibling timings file, never here:
    this file is byte-identical across reruns of the same config."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([
                r.function_id, "-".join(str(w) for w in r.network_shape),
                r.seed, r.n_train, _fmt(r.snr_db), _fmt(r.filter_sigma),
                _fmt(r.oversample_factor), _fmt(r.test_rmse)])


def write_timings_csv(records: list[ExperimentRecord], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["function_id", "seed", "n_train", "wall_time_s"])
        for r in records:
            writer.writerow([r.function_id, r.seed, r.n_train,
                             f"{r.wall_time_s:.3f}"])


def write_table_csv(rows: list[dict], path) -> None:
    """Aggregate rows (list of uniform dicts) to CSV."""
    if not rows:
        raise ValueError("no rows to write")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        cols = list(rows[0].keys())
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in cols])
