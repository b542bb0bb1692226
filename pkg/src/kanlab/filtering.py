"""Gaussian kernel pre-filtering of scattered training labels, plus a
band-limited sinc-reconstruction demonstrator.

The filter replaces each label with a convex combination of all labels,
weighted by exp(-||x_i - x_j||^2 / 2 sigma^2) and normalized per row. Row
normalization makes the smoother exact on constant labels; tiny weights can
be cut off and the matrix kept sparse.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .datasets import LabeledDataset

_BLOCK_ROWS = 512


@dataclass(frozen=True)
class KernelFilterConfig:
    sigma: float
    cutoff: float = 1e-12

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be >= 0, got {self.cutoff}")


@dataclass
class KernelMatrix:
    """Row-stochastic nonnegative weights, sparse CSR storage."""

    weights: sparse.csr_matrix

    @property
    def shape(self):
        return self.weights.shape

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return self.weights @ values

    def toarray(self) -> np.ndarray:
        return self.weights.toarray()


def _raw_block(inputs: np.ndarray, lo: int, hi: int, sigma: float,
               cutoff: float) -> np.ndarray:
    """Dense rows lo:hi of the unnormalized kernel, cutoff applied."""
    d2 = ((inputs[lo:hi, None, :] - inputs[None, :, :]) ** 2).sum(axis=2)
    w = np.exp(-d2 / (2.0 * sigma * sigma))
    if cutoff > 0:
        w[w < cutoff] = 0.0
    return w


def build_kernel(inputs: np.ndarray, cfg: KernelFilterConfig) -> KernelMatrix:
    """Row-normalized Gaussian weights between all pairs of input points.

    Entries below cfg.cutoff are dropped before normalization, which is
    what keeps the matrix sparse when the bandwidth is small relative to
    the cloud diameter.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[0] < 1:
        raise ValueError(f"inputs must be a nonempty N x d matrix, got {inputs.shape}")
    n = inputs.shape[0]
    blocks = []
    for lo in range(0, n, _BLOCK_ROWS):
        hi = min(lo + _BLOCK_ROWS, n)
        w = _raw_block(inputs, lo, hi, cfg.sigma, cfg.cutoff)
        w /= w.sum(axis=1, keepdims=True)
        blocks.append(sparse.csr_matrix(w))
    return KernelMatrix(sparse.vstack(blocks, format="csr"))


def filter_labels(inputs: np.ndarray, labels: np.ndarray,
                  cfg: KernelFilterConfig) -> np.ndarray:
    """Kernel-smoothed labels without materializing the full matrix.

    Rows are processed in blocks; each filtered value is the same
    row-normalized dot product build_kernel would produce.
    """
    inputs = np.asarray(inputs, dtype=float)
    labels = np.asarray(labels, dtype=float)
    n = inputs.shape[0]
    out = np.empty(n)
    for lo in range(0, n, _BLOCK_ROWS):
        hi = min(lo + _BLOCK_ROWS, n)
        w = _raw_block(inputs, lo, hi, cfg.sigma, cfg.cutoff)
        out[lo:hi] = (w @ labels) / w.sum(axis=1)
    return out


def kernel_filter(ds: LabeledDataset, cfg: KernelFilterConfig) -> LabeledDataset:
    """Replace labels by their kernel-smoothed values.

    Inputs and clean labels pass through untouched; the filter bandwidth and
    cutoff are recorded on the returned dataset.
    """
    smoothed = filter_labels(ds.inputs, ds.labels, cfg)
    return replace(ds, labels=smoothed, filter_sigma=cfg.sigma,
                   filter_cutoff=cfg.cutoff)


def sinc_reconstruct(samples, bandwidth: float, spacing: float, t) -> float | np.ndarray:
    """Band-limited reconstruction from uniform samples (t_k, f_k).

    Samples must sit on the grid t_k = k * spacing / (2 * bandwidth) with
    0 < spacing <= 1; smaller spacing means oversampling. The reconstruction
        f(t) = spacing * sum_k f_k * sinc(2 * bandwidth * (t - t_k))
    low-passes at `bandwidth`, so i.i.d. sample noise enters the output with
    variance shrunk by the factor `spacing`.
    """
    if not (0 < spacing <= 1.0):
        raise ValueError(f"spacing must be in (0, 1], got {spacing}")
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2 or samples.shape[0] < 1:
        raise ValueError("samples must be a nonempty sequence of (t_k, f_k) pairs")
    t_k = samples[:, 0]
    f_k = samples[:, 1]
    step = spacing / (2.0 * bandwidth)
    k_idx = t_k / step
    if np.abs(k_idx - np.round(k_idx)).max() > 1e-9 * max(1.0, np.abs(t_k).max()):
        raise ValueError("sample points do not sit on the uniform grid "
                         "k * spacing / (2 * bandwidth)")
    if samples.shape[0] > 1:
        gaps = np.round(np.diff(np.sort(k_idx)))
        if np.any(gaps != 1):
            raise ValueError("sample grid has gaps or duplicates")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    vals = spacing * (np.sinc(2.0 * bandwidth * (np.atleast_1d(t)[:, None] - t_k[None, :]))
                      @ f_k)
    return float(vals[0]) if scalar else vals
