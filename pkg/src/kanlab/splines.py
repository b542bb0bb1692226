"""Uniform B-spline bases on a fixed grid.

Every edge activation in the network is a cubic-by-default B-spline
expansion over a shared uniform knot vector. The grid is extended past the
nominal range by `order` extra uniformly spaced knots per side, so inputs
that drift slightly out of range still see smooth (if no longer
partition-of-unity) basis values instead of a hard clamp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SplineGrid:
    """Uniform knot vector on [range_lo, range_hi] with `grid_count` interior
    intervals and degree `order`. Carries G + 2k + 1 knots and supports
    G + k basis functions."""

    range_lo: float
    range_hi: float
    grid_count: int
    order: int
    knots: np.ndarray = field(repr=False)

    @property
    def n_basis(self) -> int:
        return self.grid_count + self.order

    @property
    def spacing(self) -> float:
        return (self.range_hi - self.range_lo) / self.grid_count


def build_grid(range_lo: float, range_hi: float, grid_count: int = 5,
               order: int = 3) -> SplineGrid:
    """Build a uniform grid with `order` extrapolated knots beyond each end.

    Raises ValueError if range_lo >= range_hi, grid_count < 1 or order < 0.
    """
    if not (range_lo < range_hi):
        raise ValueError(f"range_lo must be < range_hi, got [{range_lo}, {range_hi}]")
    if grid_count < 1:
        raise ValueError(f"grid_count must be >= 1, got {grid_count}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    h = (range_hi - range_lo) / grid_count
    knots = range_lo + h * np.arange(-order, grid_count + order + 1, dtype=float)
    return SplineGrid(float(range_lo), float(range_hi), int(grid_count),
                      int(order), knots)


def _basis_stack(grid: SplineGrid, x: np.ndarray, with_deriv: bool):
    """Cox-de Boor recursion specialized to uniform knots, banded form.

    Per point only the k+1 basis functions covering its knot interval can be
    nonzero, so the recursion runs on local values N_j^d = B_{idx-d+j,d}(x):
        N_j^d = ((u + d - j) * N_{j-1}^{d-1} + (j + 1 - u) * N_j^{d-1}) / d,
    with u the fractional position inside interval `idx` (uniform knots make
    every denominator equal to d*h). The derivative falls out of the saved
    degree k-1 values as B'_{i,k} = (B_{i,k-1} - B_{i+1,k-1}) / h. Local
    values are scattered into the dense (N, n_basis) matrix at the end;
    points outside the knot span, and local indices beyond the finite basis
    family, contribute nothing.
    """
    t = grid.knots
    m = t.shape[0]
    k = grid.order
    h = grid.spacing
    nb = grid.n_basis
    n = x.shape[0]

    # searchsorted reproduces the half-open comparison t[i] <= x < t[i+1]
    # exactly, including at machine-precision knot hits, where a floor of
    # (x - t[0]) / h can land one interval off.
    idx = np.searchsorted(t, x, side="right").astype(np.int64) - 1
    # x exactly at the last knot counts as the last interval, so the
    # degenerate order-0 grid keeps its indicator closed at range_hi.
    idx[x == t[-1]] = m - 2
    in_span = (idx >= 0) & (idx <= m - 2) & np.isfinite(x)
    safe = np.clip(idx, 0, m - 2)
    # out-of-span rows are masked later; clipping keeps their u finite
    u = np.clip((x - t[safe]) / h, 0.0, 1.0)

    local = np.zeros((n, k + 1))
    local[:, 0] = 1.0
    low = None
    for d in range(1, k + 1):
        if with_deriv and d == k:
            low = local[:, :k].copy()
        saved = np.zeros(n)
        for r in range(d):
            temp = local[:, r] / d
            local[:, r] = saved + (r + 1.0 - u) * temp
            saved = (u + d - r - 1.0) * temp
        local[:, d] = saved
    basis_local = local

    if with_deriv:
        # B'_{i,k} = (B_{i,k-1} - B_{i+1,k-1}) / h on a uniform grid.
        deriv_local = np.zeros((n, k + 1))
        if k > 0:
            deriv_local[:, 1:] += low
            deriv_local[:, :k] -= low
            deriv_local /= h
    else:
        deriv_local = None

    # Scatter the k+1 local values into a guarded dense matrix: column
    # indices land in [-1, nb + 2k] after the +k shift, so guard columns
    # absorb the basis indices that fall outside the finite family, and
    # out-of-span rows contribute zeros (single row per point, no clashes).
    cols = idx[:, None] + np.arange(-k, 1)[None, :] + k
    rows = np.arange(n)[:, None]
    vals = basis_local * in_span[:, None]

    guard = np.zeros((n, nb + 2 * k + 1))
    guard[rows, cols] = vals
    basis = np.ascontiguousarray(guard[:, k:k + nb])
    if not with_deriv:
        return basis, None
    guard_d = np.zeros((n, nb + 2 * k + 1))
    guard_d[rows, cols] = deriv_local * in_span[:, None]
    deriv = np.ascontiguousarray(guard_d[:, k:k + nb])
    return basis, deriv


def basis_matrix(grid: SplineGrid, x: np.ndarray) -> np.ndarray:
    """Evaluate all G+k basis functions at each point of x, shape (N, G+k)."""
    x = np.asarray(x, dtype=float)
    basis, _ = _basis_stack(grid, x, with_deriv=False)
    return basis


def basis_and_deriv_matrix(grid: SplineGrid, x: np.ndarray):
    """Basis values and first derivatives in a single recursion pass."""
    x = np.asarray(x, dtype=float)
    return _basis_stack(grid, x, with_deriv=True)


def deriv_matrix(grid: SplineGrid, x: np.ndarray) -> np.ndarray:
    """First derivative of each basis function at each point of x.

    Right-limit convention at knot points, inherited from the half-open
    order-0 indicators.
    """
    x = np.asarray(x, dtype=float)
    _, deriv = _basis_stack(grid, x, with_deriv=True)
    return deriv


def basis_eval(grid: SplineGrid, x: float) -> np.ndarray:
    """Basis values at a single point, shape (G+k,)."""
    return basis_matrix(grid, np.array([x]))[0]


def basis_deriv(grid: SplineGrid, x: float) -> np.ndarray:
    """Basis derivatives at a single point, shape (G+k,)."""
    return deriv_matrix(grid, np.array([x]))[0]
