"""Synthetic regression targets, dataset sampling and label-noise injection.

Inputs are always drawn uniformly from [-1, 1]^d. Noise goes on the training
labels only; every dataset keeps its clean labels around so signal-to-noise
bookkeeping stays exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class TargetFunction:
    """One benchmark target: a pure vectorized evaluator plus the network
    shape conventionally used to fit it."""

    id: str
    arity: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    default_shape: tuple[int, ...]


def _f1(x):
    return np.exp(np.sin(np.pi * x[:, 0]) + x[:, 1] ** 2)


def _f2(x):
    return x[:, 0] * x[:, 1]


def _f3(x):
    return np.exp(0.5 * (np.sin(np.pi * (x[:, 0] ** 2 + x[:, 1] ** 2))
                         + np.sin(np.pi * (x[:, 2] ** 2 + x[:, 3] ** 2))))


def _f4(x):
    return 1.0 + x[:, 0] * np.sin(x[:, 1])


def _f5(x):
    return np.arcsin(x[:, 0] * np.sin(x[:, 1]))


def _f6(x):
    return x[:, 0] * np.sqrt(x[:, 1] ** 2 + x[:, 2] ** 2)


FUNCTIONS: dict[str, TargetFunction] = {
    "f1": TargetFunction("f1", 2, _f1, (2, 5, 1)),
    "f2": TargetFunction("f2", 2, _f2, (2, 5, 1)),
    "f3": TargetFunction("f3", 4, _f3, (4, 2, 1, 1)),
    "f4": TargetFunction("f4", 2, _f4, (2, 2, 1)),
    "f5": TargetFunction("f5", 2, _f5, (2, 2, 1)),
    "f6": TargetFunction("f6", 3, _f6, (3, 2, 2, 1)),
}


def get_function(fn_id: str) -> TargetFunction:
    try:
        return FUNCTIONS[fn_id]
    except KeyError:
        raise ValueError(f"unknown function id {fn_id!r}; known: {sorted(FUNCTIONS)}")


def eval_target(fn: TargetFunction, x: np.ndarray) -> float:
    """Evaluate the target on one input vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != fn.arity:
        raise ValueError(f"{fn.id} takes {fn.arity} inputs, got shape {x.shape}")
    return float(fn.evaluator(x[None, :])[0])


@dataclass(frozen=True)
class LabeledDataset:
    """Input matrix plus (possibly noisy) labels and the retained clean ones.

    filter_sigma / filter_cutoff are set only on kernel-filtered datasets.
    """

    inputs: np.ndarray
    labels: np.ndarray
    clean_labels: np.ndarray
    noise_sigma: float = 0.0
    seed: int | None = None
    filter_sigma: float | None = None
    filter_cutoff: float | None = None

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Either a fixed label-noise standard deviation or a target SNR in dB."""

    mode: str  # "fixed-sigma" | "target-snr"
    value: float

    def __post_init__(self):
        if self.mode not in ("fixed-sigma", "target-snr"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.mode == "fixed-sigma" and self.value < 0:
            raise ValueError(f"sigma must be >= 0, got {self.value}")
        if not np.isfinite(self.value):
            raise ValueError("noise value must be finite")


def sample_dataset(fn: TargetFunction, n: int, seed: int) -> LabeledDataset:
    """n i.i.d. uniform points on [-1, 1]^arity with clean labels."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(-1.0, 1.0, size=(n, fn.arity))
    clean = fn.evaluator(inputs)
    return LabeledDataset(inputs, clean.copy(), clean, noise_sigma=0.0, seed=seed)


def noise_sigma_for_snr(clean_labels: np.ndarray, snr_db: float) -> float:
    """Sigma that hits the target SNR, using mean-square signal power."""
    power = float(np.mean(np.asarray(clean_labels, dtype=float) ** 2))
    return float(np.sqrt(power / 10.0 ** (snr_db / 10.0)))


def add_noise(ds: LabeledDataset, spec: NoiseSpec, seed: int) -> LabeledDataset:
    """Return a copy with labels = clean_labels + N(0, sigma^2) draws.

    In target-snr mode, sigma is derived from the dataset's own clean-label
    mean-square power. Inputs and clean labels are never touched.
    """
    if spec.mode == "fixed-sigma":
        sigma = float(spec.value)
    else:
        sigma = noise_sigma_for_snr(ds.clean_labels, spec.value)
    rng = np.random.default_rng(seed)
    noisy = ds.clean_labels + rng.normal(0.0, sigma, size=ds.n)
    return replace(ds, labels=noisy, noise_sigma=sigma)


def snr_db(ds: LabeledDataset) -> float:
    """10*log10(mean(clean^2) / mean((labels-clean)^2)).

    Signal power is the mean square of the clean labels, not their variance.
    """
    noise_power = float(np.mean((ds.labels - ds.clean_labels) ** 2))
    if noise_power == 0.0:
        raise ValueError("SNR is undefined for a noise-free dataset")
    signal_power = float(np.mean(ds.clean_labels ** 2))
    return 10.0 * np.log10(signal_power / noise_power)


def save_dataset_csv(ds: LabeledDataset, path) -> None:
    """Columns x1..xd, label, clean_label. Filtered datasets get a leading
    metadata comment line recording the filter bandwidth and cutoff."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        if ds.filter_sigma is not None:
            fh.write(f"# filter_sigma={ds.filter_sigma!r} "
                     f"filter_cutoff={ds.filter_cutoff!r}\n")
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(ds.dim)]
                        + ["label", "clean_label"])
        for row, label, clean in zip(ds.inputs, ds.labels, ds.clean_labels):
            writer.writerow([repr(float(v)) for v in row]
                            + [repr(float(label)), repr(float(clean))])


def load_dataset_csv(path) -> LabeledDataset:
    path = Path(path)
    filter_sigma = filter_cutoff = None
    with path.open() as fh:
        first = fh.readline()
        if first.startswith("#"):
            parts = dict(p.split("=") for p in first[1:].split())
            filter_sigma = float(parts["filter_sigma"])
            filter_cutoff = float(parts["filter_cutoff"])
            first = fh.readline()
        header = first.strip().split(",")
        if header[-2:] != ["label", "clean_label"]:
            raise ValueError(f"unexpected dataset header in {path}: {header}")
        dim = len(header) - 2
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float)
    labels, clean = data[:, dim], data[:, dim + 1]
    # The CSV schema does not carry the nominal noise level; report the
    # realized one so the noise-free invariant survives a round trip.
    realized = float(np.sqrt(np.mean((labels - clean) ** 2)))
    return LabeledDataset(data[:, :dim], labels, clean, noise_sigma=realized,
                          filter_sigma=filter_sigma, filter_cutoff=filter_cutoff)
