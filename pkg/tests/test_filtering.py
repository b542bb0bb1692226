"""Kernel matrix construction against a dense brute-force oracle, the
smoothing properties of the filter, and the sinc demonstrator."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kanlab.datasets import (FUNCTIONS, LabeledDataset, NoiseSpec, add_noise,
                             sample_dataset)
from kanlab.filtering import (KernelFilterConfig, build_kernel, filter_labels,
                              kernel_filter, sinc_reconstruct)


def dense_kernel_oracle(inputs, sigma, cutoff=0.0):
    """Double loop over all pairs, written independently of the blocked code."""
    n = len(inputs)
    w = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            d2 = float(np.sum((inputs[j] - inputs[k]) ** 2))
            val = np.exp(-d2 / (2 * sigma ** 2))
            w[j, k] = 0.0 if val < cutoff else val
    return w / w.sum(axis=1, keepdims=True)


class TestConfig:
    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            KernelFilterConfig(0.0)
        with pytest.raises(ValueError):
            KernelFilterConfig(-1.0)

    def test_rejects_negative_cutoff(self):
        with pytest.raises(ValueError):
            KernelFilterConfig(1.0, cutoff=-1e-9)


class TestBuildKernel:
    def test_single_point(self):
        km = build_kernel(np.zeros((1, 2)), KernelFilterConfig(0.5))
        assert km.toarray() == pytest.approx(np.array([[1.0]]))

    def test_two_points_normalization(self):
        d = 0.7
        sigma = 0.4
        km = build_kernel(np.array([[0.0], [d]]), KernelFilterConfig(sigma, 0.0))
        off = np.exp(-d * d / (2 * sigma * sigma))
        expect = off / (1 + off)
        got = km.toarray()
        assert got[0, 1] == pytest.approx(expect, rel=1e-12)
        assert got[1, 0] == pytest.approx(expect, rel=1e-12)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(0)
        inputs = rng.uniform(-1, 1, (50, 3))
        km = build_kernel(inputs, KernelFilterConfig(0.3, 0.0))
        oracle = dense_kernel_oracle(inputs, 0.3)
        assert np.abs(km.toarray() - oracle).max() < 1e-12

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(1)
        inputs = rng.uniform(-1, 1, (200, 2))
        km = build_kernel(inputs, KernelFilterConfig(0.1))
        sums = np.asarray(km.weights.sum(axis=1)).ravel()
        assert np.abs(sums - 1).max() < 1e-10

    def test_nonnegative_with_positive_diagonal(self):
        rng = np.random.default_rng(2)
        inputs = rng.uniform(-1, 1, (80, 2))
        km = build_kernel(inputs, KernelFilterConfig(0.05))
        dense = km.toarray()
        assert dense.min() >= 0.0
        assert np.diag(dense).min() > 0.0

    def test_cutoff_prunes_entries(self):
        inputs = np.array([[0.0], [10.0]])
        km = build_kernel(inputs, KernelFilterConfig(0.1, cutoff=1e-12))
        assert km.weights.nnz == 2  # only the diagonal survives

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            build_kernel(np.zeros((0, 2)), KernelFilterConfig(1.0))

    def test_blocked_filter_matches_matrix_product(self):
        # 700 rows crosses the internal block size
        rng = np.random.default_rng(3)
        inputs = rng.uniform(-1, 1, (700, 2))
        labels = rng.normal(size=700)
        cfg = KernelFilterConfig(0.2)
        km = build_kernel(inputs, cfg)
        direct = filter_labels(inputs, labels, cfg)
        assert np.abs(km.apply(labels) - direct).max() < 1e-12


class TestKernelFilter:
    def test_constant_labels_fixpoint(self):
        rng = np.random.default_rng(4)
        inputs = rng.uniform(-1, 1, (60, 2))
        c = 2.37
        ds = LabeledDataset(inputs, np.full(60, c), np.full(60, c))
        out = kernel_filter(ds, KernelFilterConfig(0.3))
        assert np.abs(out.labels - c).max() < 1e-12

    def test_tiny_sigma_is_identity(self):
        rng = np.random.default_rng(5)
        inputs = rng.uniform(-1, 1, (40, 2))
        labels = rng.normal(size=40)
        ds = LabeledDataset(inputs, labels, labels)
        dmin = np.sqrt(((inputs[:, None, :] - inputs[None, :, :]) ** 2)
                       .sum(-1)[~np.eye(40, dtype=bool)].min())
        out = kernel_filter(ds, KernelFilterConfig(dmin / 100))
        assert np.abs(out.labels - labels).max() < 1e-9

    def test_three_point_hand_case(self):
        # points 0, 0.1, 10 on a line, labels 0, 1, 0, sigma 0.1; the value
        # at point 0 is e^{-1/2} / (1 + e^{-1/2} + e^{-5000}), worked by hand
        ds = LabeledDataset(np.array([[0.0], [0.1], [10.0]]),
                            np.array([0.0, 1.0, 0.0]),
                            np.array([0.0, 1.0, 0.0]))
        out = kernel_filter(ds, KernelFilterConfig(0.1, cutoff=0.0))
        assert out.labels[0] == pytest.approx(0.37754066879814546, rel=1e-12)
        assert out.labels[1] == pytest.approx(0.6224593312018546, rel=1e-12)
        assert out.labels[2] == pytest.approx(0.0, abs=1e-300)

    def test_averaging_stays_within_label_range(self):
        rng = np.random.default_rng(6)
        inputs = rng.uniform(-1, 1, (100, 2))
        labels = rng.normal(size=100)
        ds = LabeledDataset(inputs, labels, labels)
        out = kernel_filter(ds, KernelFilterConfig(0.4))
        assert out.labels.min() >= labels.min() - 1e-12
        assert out.labels.max() <= labels.max() + 1e-12

    def test_variance_shrinks(self):
        ds = sample_dataset(FUNCTIONS["f2"], 300, seed=7)
        noisy = add_noise(ds, NoiseSpec("fixed-sigma", 0.5), seed=8)
        out = kernel_filter(noisy, KernelFilterConfig(0.3))
        assert np.var(out.labels) < np.var(noisy.labels)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(9)
        inputs = rng.uniform(-1, 1, (64, 2))
        labels = rng.normal(size=64)
        perm = rng.permutation(64)
        ds = LabeledDataset(inputs, labels, labels)
        permuted = LabeledDataset(inputs[perm], labels[perm], labels[perm])
        cfg = KernelFilterConfig(0.25)
        out = kernel_filter(ds, cfg)
        out_p = kernel_filter(permuted, cfg)
        assert np.allclose(out.labels[perm], out_p.labels, rtol=0, atol=1e-12)

    def test_metadata_recorded_and_sources_untouched(self):
        ds = sample_dataset(FUNCTIONS["f1"], 50, seed=10)
        noisy = add_noise(ds, NoiseSpec("fixed-sigma", 0.2), seed=11)
        out = kernel_filter(noisy, KernelFilterConfig(0.12))
        assert out.filter_sigma == 0.12
        assert out.filter_cutoff == 1e-12
        assert np.array_equal(out.inputs, noisy.inputs)
        assert np.array_equal(out.clean_labels, noisy.clean_labels)
        assert not np.array_equal(out.labels, noisy.labels)


def uniform_samples(signal, bandwidth, spacing, n_half):
    step = spacing / (2 * bandwidth)
    t_k = np.arange(-n_half, n_half + 1) * step
    return np.column_stack([t_k, signal(t_k)]), t_k


class TestSincReconstruct:
    def test_sample_point_recovery(self):
        bw = 7.0
        samples, t_k = uniform_samples(lambda t: np.sin(2 * np.pi * t), bw, 1.0, 600)
        mid = t_k[len(t_k) // 2 + 3]
        got = sinc_reconstruct(samples, bw, 1.0, float(mid))
        assert abs(got - np.sin(2 * np.pi * mid)) < 1e-6

    def test_band_limited_signal_recovered_on_central_half(self):
        bw = 1.05 * 2 * np.pi  # just above the signal's angular frequency
        samples, t_k = uniform_samples(lambda t: np.sin(2 * np.pi * t), bw, 0.5, 2000)
        window = t_k.max()
        ts = np.linspace(-window / 4, window / 4, 200)
        rec = sinc_reconstruct(samples, bw, 0.5, ts)
        assert np.abs(rec - np.sin(2 * np.pi * ts)).max() < 1e-3

    def test_oversampling_averages_noise(self):
        bw = 7.0
        rng = np.random.default_rng(0)
        ts = np.linspace(-2, 2, 50)
        rmses = {}
        for spacing in (1.0, 0.25):
            samples, t_k = uniform_samples(lambda t: np.sin(2 * np.pi * t), bw,
                                           spacing, int(400 / spacing))
            errs = []
            for _ in range(20):
                noisy = samples.copy()
                noisy[:, 1] += rng.normal(0, 0.2, size=len(noisy))
                rec = sinc_reconstruct(noisy, bw, spacing, ts)
                errs.append(np.sqrt(np.mean((rec - np.sin(2 * np.pi * ts)) ** 2)))
            rmses[spacing] = np.mean(errs)
        assert rmses[0.25] < rmses[1.0]

    def test_rejects_nonuniform_samples(self):
        bw = 2.0
        samples, _ = uniform_samples(np.cos, bw, 0.5, 20)
        samples[3, 0] += 0.01
        with pytest.raises(ValueError):
            sinc_reconstruct(samples, bw, 0.5, 0.0)
        gappy = np.delete(samples, 7, axis=0)
        with pytest.raises(ValueError):
            sinc_reconstruct(gappy, bw, 0.5, 0.0)

    def test_rejects_bad_spacing(self):
        samples = np.array([[0.0, 1.0]])
        with pytest.raises(ValueError):
            sinc_reconstruct(samples, 2.0, 1.5, 0.0)
        with pytest.raises(ValueError):
            sinc_reconstruct(samples, 2.0, 0.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.floats(0.05, 1.0))
def test_row_stochastic_for_any_cloud(n, sigma):
    rng = np.random.default_rng(n)
    inputs = rng.uniform(-1, 1, (n, 2))
    km = build_kernel(inputs, KernelFilterConfig(sigma))
    sums = np.asarray(km.weights.sum(axis=1)).ravel()
    assert np.abs(sums - 1).max() < 1e-10
