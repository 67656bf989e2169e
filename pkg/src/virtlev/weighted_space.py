"""Grids, polynomial weights, weighted L2 norms and operator-norm estimation.

All operators are dense kernel matrices sampled on uniform grids; integrals
use the uniform-weight rule (trapezoid up to an O(h) endpoint term that is
negligible for the decaying integrands this package works with).  Operator
norms between weighted L2 spaces reduce to the largest singular value of a
diagonally rescaled matrix; that number is computed either by full SVD
(small matrices) or by a deterministic power iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, InvalidOperator

#: seed of the fixed start vector used by every power iteration (reproducibility)
_PI_SEED = 12345


@dataclass(frozen=True)
class Grid1D:
    """Uniform symmetric grid on [-R, R] with an odd number of points.

    Oddness makes x = 0 an exact grid point; potentials are centered there.
    """

    half_width: float
    n_points: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError("n_points must be odd and >= 3")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        x = -self.half_width + self.spacing * np.arange(self.n_points)
        x[(self.n_points - 1) // 2] = 0.0  # exact center
        return x

    def refined(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.half_width, factor * (self.n_points - 1) + 1)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid h, 2h, ..., nh = R on the open ray (0, R].

    r = 0 is excluded; half-line operators built on this grid carry an
    implicit Dirichlet condition at the origin.
    """

    max_radius: float
    n_points: int

    def __post_init__(self):
        if not self.max_radius > 0:
            raise ValueError("max_radius must be positive")
        if self.n_points < 3:
            raise ValueError("n_points must be >= 3")

    @property
    def spacing(self) -> float:
        return self.max_radius / self.n_points

    @cached_property
    def points(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.n_points + 1)

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.max_radius, factor * self.n_points)


@dataclass(frozen=True)
class IndexGrid:
    """Integer positions 1..n with unit spacing, for sequence-space operators."""

    n_points: int

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")

    @property
    def spacing(self) -> float:
        return 1.0

    @cached_property
    def points(self) -> np.ndarray:
        return np.arange(1, self.n_points + 1, dtype=float)


def weight(x, s: float):
    """Polynomial weight <x>^s = (1 + x^2)^(s/2); accepts scalars or arrays."""
    return (1.0 + np.square(np.asarray(x, dtype=float))) ** (s / 2.0)


def weighted_l2_norm(f, grid, s: float = 0.0) -> float:
    """Discrete weighted L2 norm (h * sum <x_i>^{2s} |f_i|^2)^(1/2)."""
    f = np.asarray(f)
    if f.shape != grid.points.shape:
        raise DimensionMismatch(
            f"sample length {f.shape} does not match grid {grid.points.shape}"
        )
    w = weight(grid.points, s)
    return float(np.sqrt(grid.spacing * np.sum(np.abs(w * f) ** 2)))


@dataclass(frozen=True)
class KernelOperator:
    """Dense kernel K(x_i, y_j) acting as f -> h * K @ f.

    entries[i, j] samples the kernel at (x_i of grid_out, y_j of grid_in);
    the quadrature weight is the spacing of grid_in.
    """

    grid_out: object
    grid_in: object
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries)
        if e.shape != (self.grid_out.n_points, self.grid_in.n_points):
            raise DimensionMismatch(
                f"entries shape {e.shape} does not match grids "
                f"({self.grid_out.n_points}, {self.grid_in.n_points})"
            )
        if not np.all(np.isfinite(e)):
            raise InvalidOperator("kernel entries must be finite")

    @property
    def quadrature_weight(self) -> float:
        return self.grid_in.spacing

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Discretized integral operator: (Kf)(x_i) = h * sum_j K_ij f_j."""
        f = np.asarray(f)
        if f.shape[0] != self.grid_in.n_points:
            raise DimensionMismatch("vector length does not match grid_in")
        return self.quadrature_weight * (self.entries @ f)


def _svd_norm(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False)[0])


def _power_iteration_norm(matvec, rmatvec, n_in: int, dtype, tol: float = 1e-8,
                          max_iter: int = 20000, v0: np.ndarray | None = None,
                          return_vectors: bool = False):
    """Largest singular value via power iteration on M*M.

    Deterministic: the start vector comes from a fixed seed (or a caller
    supplied warm start).  Converges when the Rayleigh estimate is stable to
    `tol` relative on two consecutive iterations.  With return_vectors the
    right/left singular vector approximations are returned as well.
    """
    if v0 is not None and np.linalg.norm(v0) > 0:
        v = np.asarray(v0, dtype=dtype).copy()
    else:
        rng = np.random.default_rng(_PI_SEED)
        v = rng.standard_normal(n_in).astype(dtype, copy=False)
        if np.issubdtype(np.dtype(dtype), np.complexfloating):
            v = v + 1j * rng.standard_normal(n_in)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return (0.0, None, None) if return_vectors else 0.0
    v = v / nv
    sigma = 0.0
    sigma_prev = -1.0
    w = None
    hits = 0
    for _ in range(max_iter):
        w = matvec(v)
        sigma = float(np.linalg.norm(w))
        if sigma == 0.0:
            return (0.0, v, None) if return_vectors else 0.0
        vn = rmatvec(w)
        nv = np.linalg.norm(vn)
        if nv == 0.0:
            break
        v = vn / nv
        if sigma_prev > 0 and abs(sigma - sigma_prev) <= tol * sigma:
            hits += 1
            if hits >= 2:
                break
        else:
            hits = 0
        sigma_prev = sigma
    if return_vectors:
        u = w / sigma if (w is not None and sigma > 0) else None
        return sigma, v, u
    return sigma


def _rescaled_matrix(op: KernelOperator, s_in: float, s_out: float) -> np.ndarray:
    w_out = weight(op.grid_out.points, -s_out)
    w_in = weight(op.grid_in.points, -s_in)
    scale = np.sqrt(op.grid_in.spacing * op.grid_out.spacing)
    return (w_out[:, None] * op.entries) * (w_in[None, :] * scale)


def operator_norm_weighted(op: KernelOperator, s_in: float, s_out: float,
                           tol: float = 1e-8, method: str = "auto") -> float:
    """Norm of the kernel operator as a map L2_{s_in} -> L2_{-s_out}.

    Equals the largest singular value of M_ij = <x_i>^{-s_out} K_ij <y_j>^{-s_in} h
    (with h replaced by sqrt(h_in h_out) when the grids differ).  `method` is
    "svd", "power", or "auto" (SVD for n <= 2000, power iteration beyond).
    """
    m = _rescaled_matrix(op, s_in, s_out)
    if not np.all(np.isfinite(m)):
        raise InvalidOperator("rescaled operator has non-finite entries")
    n = max(m.shape)
    if method == "svd" or (method == "auto" and n <= 2000):
        return _svd_norm(m)
    mh = m.conj().T
    return _power_iteration_norm(lambda v: m @ v, lambda w: mh @ w,
                                 m.shape[1], m.dtype, tol=tol)


def l1_to_linf_norm(op: KernelOperator) -> float:
    """Exact L1 -> Linf operator norm of a kernel operator: sup |K(x, y)|."""
    if op.entries.size == 0:
        return 0.0
    return float(np.max(np.abs(op.entries)))
