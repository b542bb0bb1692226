"""KAN network: spline-plus-SiLU edge activations, summation nodes.

Each edge carries one outer weight w and a vector of spline coefficients c;
its activation is phi(x) = w * (silu(x) + c . basis(x)). A node in the next
layer is the plain sum of its incoming edge activations, nothing else.
Forward and backward passes are exact and fully vectorized over the batch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import expit

from .splines import (SplineGrid, basis_and_deriv_matrix, basis_eval,
                      basis_matrix, build_grid)

CHECKPOINT_FORMAT = "kanlab-checkpoint-v1"


@dataclass(frozen=True)
class KanSpec:
    """Network shape plus the shared spline grid settings."""

    widths: tuple[int, ...]
    grid_count: int = 5
    order: int = 3
    input_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if len(self.widths) < 2:
            raise ValueError("widths needs at least an input and an output layer")
        if any(w < 1 for w in self.widths):
            raise ValueError(f"widths must be positive, got {self.widths}")
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))

    @property
    def n_basis(self) -> int:
        return self.grid_count + self.order


@dataclass
class KanLayer:
    """All edges between two adjacent layers, stored as arrays.

    weights: (d_in, d_out); coeffs: (d_in, d_out, n_basis).
    """

    weights: np.ndarray
    coeffs: np.ndarray
    grid: SplineGrid


@dataclass(frozen=True)
class KanEdge:
    """Single-edge view: one weight, one coefficient vector, the shared grid."""

    weight: float
    coeffs: np.ndarray
    grid: SplineGrid


@dataclass
class KanNetwork:
    spec: KanSpec
    layers: list[KanLayer]
    seed: int | None = None

    @property
    def n_parameters(self) -> int:
        return sum(l.weights.size + l.coeffs.size for l in self.layers)

    def edge(self, layer: int, i: int, j: int) -> KanEdge:
        l = self.layers[layer]
        return KanEdge(float(l.weights[i, j]), l.coeffs[i, j], l.grid)

    def copy(self) -> "KanNetwork":
        layers = [KanLayer(l.weights.copy(), l.coeffs.copy(), l.grid)
                  for l in self.layers]
        return KanNetwork(self.spec, layers, self.seed)


@dataclass
class GradientBundle:
    """Loss partials, shape-congruent with the network parameters."""

    d_weights: list[np.ndarray]
    d_coeffs: list[np.ndarray]


def silu(x):
    """x / (1 + exp(-x)); expit keeps the sigmoid overflow-free for any x."""
    x = np.asarray(x, dtype=float)
    return x * expit(x)


def silu_deriv(x):
    """d/dx silu(x) = s(x) * (1 + x * (1 - s(x))) with s the logistic sigmoid."""
    x = np.asarray(x, dtype=float)
    s = expit(x)
    return s * (1.0 + x * (1.0 - s))


def edge_forward(edge: KanEdge, x: float) -> float:
    """phi(x) = w * (silu(x) + coeffs . basis(x))."""
    return float(edge.weight * (silu(x) + edge.coeffs @ basis_eval(edge.grid, x)))


def init_network(spec: KanSpec, seed: int) -> KanNetwork:
    """Spline coefficients ~ N(0, (0.1/sqrt(n_basis))^2), edge weights 1.

    Small coefficients keep the initial network close to its SiLU baseline,
    matching the residual role of the spline term.
    """
    grid = build_grid(spec.input_range[0], spec.input_range[1],
                      spec.grid_count, spec.order)
    rng = np.random.default_rng(seed)
    std = 0.1 / np.sqrt(spec.n_basis)
    layers = []
    for d_in, d_out in zip(spec.widths[:-1], spec.widths[1:]):
        weights = np.ones((d_in, d_out))
        coeffs = rng.normal(0.0, std, size=(d_in, d_out, spec.n_basis))
        layers.append(KanLayer(weights, coeffs, grid))
    return KanNetwork(spec, layers, seed=seed)


def _check_inputs(net: KanNetwork, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != net.spec.widths[0]:
        raise ValueError(
            f"inputs must have shape (N, {net.spec.widths[0]}), got {inputs.shape}")
    return inputs


def _run_layers(net: KanNetwork, inputs: np.ndarray, first_basis=None,
                with_deriv: bool = False):
    """Forward pass keeping per-layer intermediates for the backward pass.

    Returns (activations, bases, acts, derivs): activations[l] is the input
    to layer l (activations[-1] is the network output), bases[l] the basis
    matrix of layer l reshaped (N, d_in, n_basis), acts[l] the per-edge
    activation silu + spline, shape (N, d_in, d_out). With `with_deriv`,
    derivs[l] holds basis derivatives for l >= 1, where backpropagation
    needs them. `first_basis` lets a training loop reuse the input-layer
    basis matrix, which never changes across steps.
    """
    a = inputs
    activations = [a]
    bases, acts, derivs = [], [], []
    for idx, layer in enumerate(net.layers):
        n, d_in = a.shape
        nb = layer.grid.n_basis
        need_d = with_deriv and idx > 0
        if idx == 0 and first_basis is not None:
            b, bd = first_basis, None
        elif need_d:
            b, bd = basis_and_deriv_matrix(layer.grid, a.ravel())
            bd = bd.reshape(n, d_in, nb)
            b = b.reshape(n, d_in, nb)
        else:
            b = basis_matrix(layer.grid, a.ravel()).reshape(n, d_in, nb)
            bd = None
        act = silu(a)[:, :, None] + np.einsum("nib,ijb->nij", b, layer.coeffs)
        a = np.einsum("nij,ij->nj", act, layer.weights)
        activations.append(a)
        bases.append(b)
        acts.append(act)
        derivs.append(bd)
    return activations, bases, acts, derivs


def forward_batch(net: KanNetwork, inputs: np.ndarray) -> np.ndarray:
    """Rowwise network evaluation, shape (N,)."""
    inputs = _check_inputs(net, inputs)
    activations, _, _, _ = _run_layers(net, inputs)
    return activations[-1][:, 0]


def forward(net: KanNetwork, input_vec: np.ndarray) -> float:
    """Evaluate the network on a single input vector."""
    input_vec = np.asarray(input_vec, dtype=float)
    if input_vec.ndim != 1 or input_vec.shape[0] != net.spec.widths[0]:
        raise ValueError(
            f"input must have shape ({net.spec.widths[0]},), got {input_vec.shape}")
    return float(forward_batch(net, input_vec[None, :])[0])


def _backward_from_intermediates(net, activations, bases, acts, derivs,
                                 residuals) -> GradientBundle:
    n = residuals.shape[0]
    # Gradient of 0.5 * mean(residual^2) wrt the output column.
    g = residuals[:, None] / n
    d_weights = [None] * len(net.layers)
    d_coeffs = [None] * len(net.layers)
    for l in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[l]
        d_weights[l] = np.einsum("nj,nij->ij", g, acts[l])
        d_coeffs[l] = np.einsum("nj,nib->ijb", g, bases[l]) * layer.weights[:, :, None]
        if l > 0:
            a = activations[l]
            sd = np.einsum("nib,ijb->nij", derivs[l], layer.coeffs)
            g = (silu_deriv(a) * (g @ layer.weights.T)
                 + np.einsum("nij,nj->ni", sd * layer.weights, g))
    return GradientBundle(d_weights, d_coeffs)


def backward(net: KanNetwork, inputs: np.ndarray,
             residuals: np.ndarray) -> GradientBundle:
    """Exact gradient of 0.5 * mean((prediction - label)^2).

    `residuals` must be prediction - label for each row of `inputs`.
    """
    inputs = _check_inputs(net, inputs)
    residuals = np.asarray(residuals, dtype=float)
    if residuals.shape != (inputs.shape[0],):
        raise ValueError(
            f"residuals must have shape ({inputs.shape[0]},), got {residuals.shape}")
    activations, bases, acts, derivs = _run_layers(net, inputs, with_deriv=True)
    return _backward_from_intermediates(net, activations, bases, acts, derivs,
                                        residuals)


def save_checkpoint(net: KanNetwork, path) -> None:
    """Write the network to a self-describing JSON checkpoint.

    Floats are serialized with repr-level precision, so a load restores the
    parameters bit-exactly.
    """
    payload = {
        "format": CHECKPOINT_FORMAT,
        "widths": list(net.spec.widths),
        "grid_count": net.spec.grid_count,
        "order": net.spec.order,
        "input_range": list(net.spec.input_range),
        "seed": net.seed,
        "layers": [
            {"weights": l.weights.tolist(), "coeffs": l.coeffs.tolist()}
            for l in net.layers
        ],
    }
    Path(path).write_text(json.dumps(payload))


def load_checkpoint(path) -> KanNetwork:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    spec = KanSpec(tuple(payload["widths"]), payload["grid_count"],
                   payload["order"], tuple(payload["input_range"]))
    grid = build_grid(spec.input_range[0], spec.input_range[1],
                      spec.grid_count, spec.order)
    layers = [
        KanLayer(np.array(l["weights"], dtype=float),
                 np.array(l["coeffs"], dtype=float), grid)
        for l in payload["layers"]
    ]
    net = KanNetwork(spec, layers, seed=payload.get("seed"))
    for layer, (d_in, d_out) in zip(net.layers, zip(spec.widths[:-1], spec.widths[1:])):
        if layer.weights.shape != (d_in, d_out):
            raise ValueError("checkpoint layer shapes do not match widths")
        if layer.coeffs.shape != (d_in, d_out, spec.n_basis):
            raise ValueError("checkpoint coefficient shapes do not match spec")
    return net
