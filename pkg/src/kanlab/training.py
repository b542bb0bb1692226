"""Full-batch first-order training and RMSE evaluation.

One run owns a private mutable copy of the network and is deterministic
given (network, data, config). The optimization loss is mean squared error;
every reported number is an RMSE.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import LabeledDataset
from .network import (KanNetwork, _backward_from_intermediates, _run_layers,
                      basis_matrix)


class TrainingDivergedError(RuntimeError):
    """Raised when the training loss stops being finite."""


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 2000
    learning_rate: float = 1e-2
    optimizer: str = "adam"  # "adam" (adaptive-moment) | "sgd" (plain gradient)
    seed: int = 0
    log_every: int = 100

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.log_every < 1:
            raise ValueError(f"log_every must be >= 1, got {self.log_every}")


@dataclass
class TrainReport:
    logged_steps: np.ndarray
    train_rmse_curve: np.ndarray
    test_rmse_curve: np.ndarray
    final_test_rmse: float
    out_of_range_fraction: float

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "train_rmse", "test_rmse"])
            for s, tr, te in zip(self.logged_steps, self.train_rmse_curve,
                                 self.test_rmse_curve):
                writer.writerow([int(s), repr(float(tr)), repr(float(te))])


def rmse(pred: np.ndarray, labels: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if pred.shape != labels.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {labels.shape}")
    if pred.size == 0:
        raise ValueError("rmse of empty vectors is undefined")
    return float(np.sqrt(np.mean((pred - labels) ** 2)))


def evaluate(net: KanNetwork, ds: LabeledDataset) -> float:
    """RMSE of the network against the dataset's operative labels."""
    from .network import forward_batch
    return rmse(forward_batch(net, ds.inputs), ds.labels)


class _Adam:
    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for p, m, v, g in zip(self.params, self.m, self.v, grads):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            m_hat = m / (1 - b1 ** self.t)
            v_hat = v / (1 - b2 ** self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _Sgd:
    def __init__(self, params, lr):
        self.params = params
        self.lr = lr

    def step(self, grads):
        for p, g in zip(self.params, grads):
            p -= self.lr * g


def _out_of_range_fraction(net: KanNetwork, activations) -> float:
    lo = net.spec.input_range[0]
    hi = net.spec.input_range[1]
    total = out = 0
    for a in activations[:-1]:  # inputs to each layer; the output is not one
        total += a.size
        out += int(np.count_nonzero((a < lo) | (a > hi)))
    return out / total if total else 0.0


def train(net: KanNetwork, train_set: LabeledDataset, test_set: LabeledDataset,
          cfg: TrainConfig) -> tuple[KanNetwork, TrainReport]:
    """Run `cfg.steps` full-batch gradient steps; return the trained copy.

    The test curve and final_test_rmse are measured against the test set's
    clean labels: test performance means recovery of the true function.
    """
    d_in = net.spec.widths[0]
    if train_set.dim != d_in or test_set.dim != d_in:
        raise ValueError(
            f"dataset width mismatch: network expects {d_in}, got "
            f"train={train_set.dim}, test={test_set.dim}")

    work = net.copy()
    params = []
    for layer in work.layers:
        params.extend([layer.weights, layer.coeffs])
    if cfg.optimizer == "adam":
        opt = _Adam(params, cfg.learning_rate)
    else:
        opt = _Sgd(params, cfg.learning_rate)

    x_train, y_train = train_set.inputs, train_set.labels
    n, d = x_train.shape
    grid0 = work.layers[0].grid
    nb = grid0.n_basis
    first_basis_train = basis_matrix(grid0, x_train.ravel()).reshape(n, d, nb)
    first_basis_test = basis_matrix(grid0, test_set.inputs.ravel()).reshape(
        test_set.n, d, nb)

    def test_rmse_now():
        acts, _, _, _ = _run_layers(work, test_set.inputs,
                                    first_basis=first_basis_test)
        return rmse(acts[-1][:, 0], test_set.clean_labels)

    logged_steps, train_curve, test_curve = [], [], []

    def log(step, train_rmse_val):
        logged_steps.append(step)
        train_curve.append(train_rmse_val)
        test_curve.append(test_rmse_now())

    activations = None
    for step in range(cfg.steps):
        activations, bases, acts, derivs = _run_layers(
            work, x_train, first_basis=first_basis_train, with_deriv=True)
        residuals = activations[-1][:, 0] - y_train
        with np.errstate(over="ignore", invalid="ignore"):
            mse = float(np.mean(residuals ** 2))
        if not np.isfinite(mse):
            raise TrainingDivergedError(
                f"non-finite training loss at step {step} "
                f"(lr={cfg.learning_rate}, optimizer={cfg.optimizer})")
        if step % cfg.log_every == 0:
            log(step, float(np.sqrt(mse)))
        grads = _backward_from_intermediates(work, activations, bases, acts,
                                             derivs, residuals)
        flat_grads = []
        for dw, dc in zip(grads.d_weights, grads.d_coeffs):
            flat_grads.extend([dw, dc])
        opt.step(flat_grads)

    activations, _, _, _ = _run_layers(work, x_train, first_basis=first_basis_train)
    final_train = rmse(activations[-1][:, 0], y_train)
    log(cfg.steps, final_train)

    report = TrainReport(
        logged_steps=np.array(logged_steps),
        train_rmse_curve=np.array(train_curve),
        test_rmse_curve=np.array(test_curve),
        final_test_rmse=test_curve[-1],
        out_of_range_fraction=_out_of_range_fraction(work, activations),
    )
    return work, report
