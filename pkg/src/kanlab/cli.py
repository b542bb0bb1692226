"""Command-line entry point.

Every subcommand resolves its full configuration (flags over an optional
JSON config file over defaults), writes the resolved config to
manifest.json in the output directory, and emits deterministic CSV
artifacts next to it. SVG charts are cosmetic; the CSVs are the contract.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import (NoiseSpec, add_noise, get_function, sample_dataset,
                       save_dataset_csv, snr_db)
from .experiments import (fit_power_law, run_combined_study,
                          run_filter_crossover, run_noise_table,
                          run_oversampling, run_sigma_sweep,
                          write_records_csv, write_table_csv,
                          write_timings_csv)
from .filtering import KernelFilterConfig, kernel_filter, sinc_reconstruct
from .network import KanSpec, init_network, save_checkpoint
from .svgplot import line_chart
from .training import TrainConfig, train

CSV_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    output_dir: Path
    seed: int


def _default_out() -> str:
    return os.environ.get("KANLAB_OUT", "runs")


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip() != ""]


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip() != ""]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kanlab",
        description="KAN noise lab: fit synthetic functions, filter noisy "
                    "labels, and run the noise/oversampling studies.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="JSON file with defaults for this command")
        p.add_argument("--out", type=str, default=None,
                       help="output directory (default $KANLAB_OUT or ./runs)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--steps", type=int, default=2000)
        p.add_argument("--lr", type=float, default=1e-2)
        p.add_argument("--n-test", type=int, default=1000)
        p.add_argument("--workers", type=int, default=os.cpu_count())

    p = sub.add_parser("fit", help="train one network on one dataset")
    common(p)
    p.add_argument("--fn", required=True, choices=sorted(
        ("f1", "f2", "f3", "f4", "f5", "f6")))
    p.add_argument("--shape", type=str, default=None,
                   help="comma-separated widths, e.g. 2,5,1")
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--snr", type=float, default=None,
                   help="target SNR in dB (alternative to --noise-sigma)")
    p.add_argument("--filter-sigma", type=float, default=None)
    p.add_argument("--cutoff", type=float, default=1e-12)
    p.add_argument("--log-every", type=int, default=100)

    p = sub.add_parser("filter", help="kernel-filter a sampled noisy dataset")
    common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--snr", type=float, default=None)
    p.add_argument("--filter-sigma", type=float, required=True)
    p.add_argument("--cutoff", type=float, default=1e-12)

    p = sub.add_parser("noise-table", help="clean vs noisy loss per function")
    common(p)
    p.add_argument("--functions", type=str, default="f1,f2,f3")
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--seeds", type=int, default=5, help="number of seeds")

    p = sub.add_parser("crossover", help="raw vs filtered loss across SNR")
    common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--filter-sigma", type=float, default=0.1)
    p.add_argument("--snr-grid", type=_float_list,
                   default=[-10, -8, -6, -4, -2, 0, 2, 4, 8, 15])
    p.add_argument("--n", type=int, default=3000)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--cutoff", type=float, default=1e-12)

    p = sub.add_parser("sigma-sweep", help="loss across filter bandwidths and SNRs")
    common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--sigma-grid", type=_float_list,
                   default=[0.02, 0.05, 0.1, 0.18, 0.3, 0.5, 0.8])
    p.add_argument("--snr-grid", type=_float_list, default=[-5, 0, 5, 15])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--cutoff", type=float, default=1e-12)

    p = sub.add_parser("oversample", help="loss vs training-set multiple r")
    common(p)
    p.add_argument("--fn", required=True)
    p.add_argument("--shape", type=str, default=None)
    p.add_argument("--n-base", type=int, default=500)
    p.add_argument("--r-grid", type=_float_list,
                   default=[1, 2, 3, 5, 8, 12, 18, 25])
    p.add_argument("--snr-grid", type=_float_list, default=[5.0])
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--mode", choices=("fresh", "duplicate"), default="fresh")
    p.add_argument("--r-min", type=float, default=5.0,
                   help="tail start for the power-law fit")

    p = sub.add_parser("combined", help="oversampling + filtering table")
    common(p)
    p.add_argument("--functions", type=str, default="f1,f2,f3")
    p.add_argument("--snrs", type=_float_list, default=[7.38, 4.46, 10.53])
    p.add_argument("--r-values", type=_int_list, default=[1, 25, 50])
    p.add_argument("--filter-sigma", type=float, default=0.1)
    p.add_argument("--n-base", type=int, default=500)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--cutoff", type=float, default=1e-12)

    p = sub.add_parser("sinc-demo", help="band-limited reconstruction vs spacing")
    common(p)
    p.add_argument("--bandwidth", type=float, default=7.0)
    p.add_argument("--spacings", type=_float_list, default=[1.0, 0.5, 0.25])
    p.add_argument("--noise-sigma", type=float, default=0.2)
    p.add_argument("--terms", type=int, default=1001)
    p.add_argument("--draws", type=int, default=20)

    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    params = {k.replace("-", "_"): v for k, v in vars(args).items()
              if k not in ("command", "config", "out")}
    if args.config is not None:
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(overrides, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
        parser_defaults = build_parser().parse_args([args.command] + _required_stub(args))
        for key, value in overrides.items():
            key = key.replace("-", "_")
            if key not in params:
                raise ConfigError(f"unknown config key {key!r} for {args.command}")
            # flags explicitly given on the command line win over the file
            if getattr(args, key) == getattr(parser_defaults, key, None):
                params[key] = value
    out = args.out if args.out is not None else _default_out()
    return RunConfig(command=args.command, params=params,
                     output_dir=Path(out), seed=int(params.get("seed", 0)))


def _required_stub(args: argparse.Namespace) -> list[str]:
    # minimal extra argv so commands with required flags can be re-parsed
    stub = []
    if getattr(args, "fn", None) is not None:
        stub += ["--fn", str(args.fn)]
    if args.command == "filter":
        stub += ["--filter-sigma", str(getattr(args, "filter_sigma"))]
    return stub


class ConfigError(ValueError):
    pass


def _write_manifest(cfg: RunConfig) -> None:
    manifest = {
        "tool": "kanlab",
        "version": __version__,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "command": cfg.command,
        "params": {k: (list(v) if isinstance(v, (tuple, list)) else v)
                   for k, v in sorted(cfg.params.items())},
    }
    (cfg.output_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _noise_args(params) -> tuple[str, float] | None:
    if params.get("noise_sigma") is not None and params.get("snr") is not None:
        raise ConfigError("give either --noise-sigma or --snr, not both")
    if params.get("noise_sigma") is not None:
        return ("fixed-sigma", params["noise_sigma"])
    if params.get("snr") is not None:
        return ("target-snr", params["snr"])
    return None


def _seed_range(params) -> range:
    return range(int(params["seeds"]))


def _cmd_fit(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    fn = get_function(p["fn"])
    shape = tuple(_int_list(p["shape"])) if p.get("shape") else fn.default_shape
    train_ds = sample_dataset(fn, p["n"], cfg.seed)
    noise = _noise_args(p)
    if noise is not None:
        train_ds = add_noise(train_ds, NoiseSpec(*noise), cfg.seed + 1)
    if p.get("filter_sigma") is not None:
        train_ds = kernel_filter(train_ds,
                                 KernelFilterConfig(p["filter_sigma"], p["cutoff"]))
    test_ds = sample_dataset(fn, p["n_test"], cfg.seed + 2)
    net = init_network(KanSpec(shape), cfg.seed + 3)
    trained, report = train(net, train_ds, test_ds,
                            TrainConfig(steps=p["steps"], learning_rate=p["lr"],
                                        seed=cfg.seed, log_every=p["log_every"]))
    report.write_csv(out / "train_curve.csv")
    save_checkpoint(trained, out / "checkpoint.json")
    summary = [{"function_id": fn.id,
                "shape": "-".join(str(w) for w in shape),
                "n_train": p["n"],
                "snr_db": snr_db(train_ds) if noise is not None else None,
                "final_test_rmse": report.final_test_rmse,
                "out_of_range_fraction": report.out_of_range_fraction}]
    write_table_csv(summary, out / "summary.csv")
    line_chart([("train", report.logged_steps, report.train_rmse_curve),
                ("test", report.logged_steps, report.test_rmse_curve)],
               out / "train_curve.svg", title=f"{fn.id} training",
               xlabel="step", ylabel="RMSE", log_y=True)


def _cmd_filter(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    fn = get_function(p["fn"])
    ds = sample_dataset(fn, p["n"], cfg.seed)
    noise = _noise_args(p)
    if noise is not None:
        ds = add_noise(ds, NoiseSpec(*noise), cfg.seed + 1)
    save_dataset_csv(ds, out / "dataset.csv")
    filtered = kernel_filter(ds, KernelFilterConfig(p["filter_sigma"], p["cutoff"]))
    save_dataset_csv(filtered, out / "dataset_filtered.csv")
    rows = [{"n": ds.n, "noise_sigma": ds.noise_sigma,
             "snr_db": snr_db(ds) if noise is not None else None,
             "filter_sigma": p["filter_sigma"],
             "rmse_labels_vs_clean_before": float(np.sqrt(np.mean(
                 (ds.labels - ds.clean_labels) ** 2))),
             "rmse_labels_vs_clean_after": float(np.sqrt(np.mean(
                 (filtered.labels - filtered.clean_labels) ** 2)))}]
    write_table_csv(rows, out / "summary.csv")


def _cmd_noise_table(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    rows, records = run_noise_table(
        functions=tuple(p["functions"].split(",")), n_train=p["n"],
        sigma_noise=p["sigma"], seeds=_seed_range(p), steps=p["steps"],
        learning_rate=p["lr"], n_test=p["n_test"], max_workers=p["workers"])
    write_table_csv(rows, out / "noise_table.csv")
    write_records_csv(records, out / "records.csv")
    write_timings_csv(records, out / "timings.csv")


def _cmd_crossover(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    result, records = run_filter_crossover(
        p["fn"], p["snr_grid"], filter_sigma=p["filter_sigma"],
        seeds=_seed_range(p), n_train=p["n"], steps=p["steps"],
        learning_rate=p["lr"], n_test=p["n_test"], filter_cutoff=p["cutoff"],
        max_workers=p["workers"])
    write_table_csv(result["rows"], out / "crossover.csv")
    write_records_csv(records, out / "records.csv")
    write_timings_csv(records, out / "timings.csv")
    write_table_csv([{"function_id": result["function_id"],
                      "filter_sigma": result["filter_sigma"],
                      "crossover_snr_db": result["crossover_snr_db"]}],
                    out / "crossover_summary.csv")
    snrs = [r["snr_db"] for r in result["rows"]]
    line_chart([("raw", snrs, [r["raw_rmse_mean"] for r in result["rows"]]),
                ("filtered", snrs, [r["filtered_rmse_mean"] for r in result["rows"]])],
               out / "crossover.svg", title=f"{p['fn']} raw vs filtered",
               xlabel="SNR (dB)", ylabel="test RMSE", log_y=True)


def _cmd_sigma_sweep(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    result, records = run_sigma_sweep(
        p["fn"], p["sigma_grid"], p["snr_grid"], n_train=p["n"],
        seeds=_seed_range(p), steps=p["steps"], learning_rate=p["lr"],
        n_test=p["n_test"], filter_cutoff=p["cutoff"], max_workers=p["workers"])
    write_table_csv(result["rows"], out / "sigma_sweep.csv")
    write_records_csv(records, out / "records.csv")
    write_timings_csv(records, out / "timings.csv")
    write_table_csv([{"snr_db": snr, "argmin_sigma": sig}
                     for snr, sig in result["argmin_sigma"].items()],
                    out / "argmin_sigma.csv")
    series = []
    for snr in p["snr_grid"]:
        rows = [r for r in result["rows"] if r["snr_db"] == snr]
        series.append((f"{snr:g} dB", [r["filter_sigma"] for r in rows],
                       [r["rmse_mean"] for r in rows]))
    line_chart(series, out / "sigma_sweep.svg",
               title=f"{p['fn']} filtering bandwidth sweep (n={p['n']})",
               xlabel="filter sigma", ylabel="test RMSE", log_y=True)


def _cmd_oversample(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    shape = tuple(_int_list(p["shape"])) if p.get("shape") else None
    result, records = run_oversampling(
        p["fn"], shape=shape, n_base=p["n_base"], r_grid=p["r_grid"],
        snr_grid=p["snr_grid"], seeds=_seed_range(p), steps=p["steps"],
        learning_rate=p["lr"], n_test=p["n_test"], mode=p["mode"],
        max_workers=p["workers"])
    write_table_csv(result["rows"], out / "oversampling.csv")
    write_records_csv(records, out / "records.csv")
    write_timings_csv(records, out / "timings.csv")
    fits = []
    for snr in p["snr_grid"]:
        rows = [r for r in result["rows"] if r["snr_db"] == snr]
        series = [(r["r"], r["rmse_mean"]) for r in rows]
        try:
            fit = fit_power_law(series, r_min=p["r_min"])
            fits.append({"snr_db": snr, "exponent": fit.exponent,
                         "amplitude": fit.amplitude, "r2": fit.r2,
                         "r_min": fit.r_min})
        except ValueError:
            fits.append({"snr_db": snr, "exponent": None, "amplitude": None,
                         "r2": None, "r_min": p["r_min"]})
    write_table_csv(fits, out / "power_law.csv")
    series = []
    for snr in p["snr_grid"]:
        rows = [r for r in result["rows"] if r["snr_db"] == snr]
        series.append((f"{snr:g} dB", [r["r"] for r in rows],
                       [r["rmse_mean"] for r in rows]))
    line_chart(series, out / "oversampling.svg",
               title=f"{p['fn']} oversampling (base n={p['n_base']})",
               xlabel="r", ylabel="test RMSE", log_x=True, log_y=True)


def _cmd_combined(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    functions = tuple(p["functions"].split(","))
    snrs = p["snrs"]
    if len(snrs) != len(functions):
        raise ConfigError("--snrs must list one SNR per function")
    rows, records = run_combined_study(
        functions=functions, snr_per_fn=dict(zip(functions, snrs)),
        r_values=p["r_values"], filter_sigma=p["filter_sigma"],
        n_base=p["n_base"], seeds=_seed_range(p), steps=p["steps"],
        learning_rate=p["lr"], n_test=p["n_test"], filter_cutoff=p["cutoff"],
        max_workers=p["workers"])
    write_table_csv(rows, out / "combined.csv")
    write_records_csv(records, out / "records.csv")
    write_timings_csv(records, out / "timings.csv")


def _cmd_sinc_demo(cfg: RunConfig, out: Path) -> None:
    p = cfg.params
    bw = p["bandwidth"]
    rng = np.random.default_rng(cfg.seed)
    t_eval = np.linspace(-0.25, 0.25, 101)

    def signal(t):
        return np.sin(2 * np.pi * t)

    rows = []
    for spacing in p["spacings"]:
        step = spacing / (2.0 * bw)
        half = p["terms"] // 2
        t_k = np.arange(-half, half + 1) * step
        clean = signal(t_k)
        errs = []
        for _ in range(p["draws"]):
            noisy = clean + rng.normal(0.0, p["noise_sigma"], size=t_k.shape)
            rec = sinc_reconstruct(np.column_stack([t_k, noisy]), bw, spacing,
                                   t_eval)
            errs.append(float(np.sqrt(np.mean((rec - signal(t_eval)) ** 2))))
        rows.append({"spacing": spacing, "noise_sigma": p["noise_sigma"],
                     "draws": p["draws"],
                     "reconstruction_rmse_mean": float(np.mean(errs)),
                     "reconstruction_rmse_std": float(np.std(errs))})
    write_table_csv(rows, out / "sinc_demo.csv")
    line_chart([("reconstruction RMSE", [r["spacing"] for r in rows],
                 [r["reconstruction_rmse_mean"] for r in rows])],
               out / "sinc_demo.svg", title="oversampled sinc reconstruction",
               xlabel="sample spacing factor", ylabel="RMSE", log_y=True)


_DISPATCH = {
    "fit": _cmd_fit,
    "filter": _cmd_filter,
    "noise-table": _cmd_noise_table,
    "crossover": _cmd_crossover,
    "sigma-sweep": _cmd_sigma_sweep,
    "oversample": _cmd_oversample,
    "combined": _cmd_combined,
    "sinc-demo": _cmd_sinc_demo,
}


def run(cfg: RunConfig) -> int:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(cfg)
    _DISPATCH[cfg.command](cfg, cfg.output_dir)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"kanlab: config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"kanlab: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: report and exit 1
        print(f"kanlab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
