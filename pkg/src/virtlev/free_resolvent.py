"""Closed-form free resolvent kernels in dimensions 1, 2, 3.

Branch convention: all kernels are built from w = sqrt(-z) with Re w > 0 for
z off the closed positive axis.  On the positive axis itself the root is
+-i sqrt(z0), with the sign selected by the side from which z approaches:
the limit from the upper half-plane gives w = -i sqrt(z0), so that the 1D/3D
kernels carry the outgoing oscillatory factor exp(i sqrt(z0) |x - y|).

Dimensions 2 and 3 are implemented radially, in the spherically symmetric
(s-wave) sector: on reduced functions u(r) = r f(r) (d=3) resp.
u(r) = sqrt(2 pi r) f(r) (d=2), with the L2 norm and the <r>^s weights of the
full space carried over exactly.  The reduced kernels

    d=3:  sinh(w r_<) exp(-w r_>) / w
    d=2:  sqrt(r rho) I0(w r_<) K0(w r_>)

are continuous up to the diagonal for r, rho > 0, so no on-diagonal
regularization is required on a RadialGrid; the pointwise full-space kernels
do raise on their diagonal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _bessel
from .errors import (
    BranchAmbiguity,
    OnDiagonalSingularity,
    ThresholdSingularity,
    UnsupportedSpectralPoint,
)
from .weighted_space import Grid1D, KernelOperator, RadialGrid


class Approach(enum.Enum):
    """How the spectral parameter approaches the essential spectrum."""

    INTERIOR = "interior"
    FROM_UPPER_HALF_PLANE = "upper"
    FROM_LOWER_HALF_PLANE = "lower"
    ALONG_NEGATIVE_AXIS = "negative_axis"


@dataclass(frozen=True)
class SpectralParameter:
    """A point z together with the side of the cut it is understood from."""

    z: complex
    approach: Approach = Approach.INTERIOR

    def __post_init__(self):
        z = complex(self.z)
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            raise ValueError("z must be finite")
        if self.approach is Approach.ALONG_NEGATIVE_AXIS:
            if z.imag != 0.0 or z.real > 0.0:
                raise ValueError("ALONG_NEGATIVE_AXIS requires real z <= 0")

    @classmethod
    def interior(cls, z) -> "SpectralParameter":
        return cls(complex(z), Approach.INTERIOR)

    @classmethod
    def from_above(cls, z) -> "SpectralParameter":
        return cls(complex(z), Approach.FROM_UPPER_HALF_PLANE)

    @classmethod
    def from_below(cls, z) -> "SpectralParameter":
        return cls(complex(z), Approach.FROM_LOWER_HALF_PLANE)

    @classmethod
    def along_negative_axis(cls, z) -> "SpectralParameter":
        return cls(complex(z), Approach.ALONG_NEGATIVE_AXIS)


def _on_positive_cut(z: complex) -> bool:
    return z.imag == 0.0 and z.real > 0.0


def sqrt_minus_z(p: SpectralParameter) -> complex:
    """Branch root sqrt(-z): Re > 0 off the cut, -+ i sqrt(z0) on it.

    Raises BranchAmbiguity for z on the closed positive axis with an
    INTERIOR approach (no side to take the limit from).
    """
    z = complex(p.z)
    if _on_positive_cut(z):
        if p.approach is Approach.FROM_UPPER_HALF_PLANE:
            return -1j * np.sqrt(z.real)
        if p.approach is Approach.FROM_LOWER_HALF_PLANE:
            return 1j * np.sqrt(z.real)
        raise BranchAmbiguity(
            f"z = {z} lies on the positive axis; specify the approach side"
        )
    if z == 0:
        if p.approach is Approach.INTERIOR:
            raise BranchAmbiguity("z = 0 is on the boundary of the cut plane")
        return 0.0 + 0.0j
    return complex(np.sqrt(complex(-z)))  # principal branch, Re > 0 off the cut


def kernel_1d(x, y, p: SpectralParameter):
    """Free 1D resolvent kernel exp(-|x-y| sqrt(-z)) / (2 sqrt(-z)).

    There is no kernel at z = 0: the two exponential solutions degenerate and
    the prefactor diverges, so that case raises ThresholdSingularity.
    """
    if complex(p.z) == 0:
        raise ThresholdSingularity("the 1D free kernel has no limit at z = 0")
    w = sqrt_minus_z(p)
    d = np.abs(np.asarray(x) - np.asarray(y))
    return np.exp(-d * w) / (2.0 * w)


def kernel_3d(r, p: SpectralParameter):
    """Full 3D kernel exp(-r sqrt(-z)) / (4 pi r) at separation r = |x - y| > 0.

    Pointwise bounded as z -> 0, where it equals 1 / (4 pi r).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise OnDiagonalSingularity("the 3D kernel is singular at r = 0")
    w = sqrt_minus_z(p)
    return np.exp(-r * w) / (4.0 * np.pi * r)


def kernel_2d(r, p: SpectralParameter):
    """Full 2D kernel K0(r sqrt(-z)) / (2 pi), for z off the closed positive axis."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise OnDiagonalSingularity("the 2D kernel is singular at r = 0")
    z = complex(p.z)
    if z.imag == 0.0 and z.real >= 0.0:
        raise UnsupportedSpectralPoint(
            "2D kernel boundary values on the positive axis are not supported"
        )
    w = sqrt_minus_z(p)
    return _bessel.k0(r * w) / (2.0 * np.pi)


def radial_reduced_kernel_3d(r, rho, w):
    """s-wave reduced 3D kernel sinh(w r_<) exp(-w r_>) / w on u = r f.

    Evaluated in the overflow-free form exp(-w(r_> - r_<)) g(2 w r_<) r_<
    with g(u) = (1 - exp(-u)) / u; at w = 0 this is exactly r_<.
    """
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    lo = np.minimum(r, rho)
    gap = np.abs(r - rho)
    w = complex(w)
    if w == 0:
        return lo.astype(complex)
    u = 2.0 * w * lo
    small = np.abs(u) < 1e-4
    us = np.where(small, u, 1.0)
    g = np.where(small, 1.0 - us / 2.0 + us * us / 6.0, (1.0 - np.exp(-u)) / np.where(small, 1.0, u))
    return np.exp(-w * gap) * g * lo


def radial_reduced_kernel_2d(r, rho, w):
    """s-wave reduced 2D kernel sqrt(r rho) I0(w r_<) K0(w r_>)."""
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    lo = np.minimum(r, rho)
    hi = np.maximum(r, rho)
    return np.sqrt(r * rho) * _bessel.i0(w * lo) * _bessel.k0(w * hi)


def build_free_kernel_operator(d: int, grid, p: SpectralParameter) -> KernelOperator:
    """Sample the free resolvent of dimension d on the grid.

    d = 1 takes a Grid1D; d = 2, 3 take a RadialGrid and produce the reduced
    s-wave kernels, whose weighted operator norms approximate the spherically
    symmetric part of the full-space resolvent.
    """
    if d == 1:
        if not isinstance(grid, Grid1D):
            raise TypeError("d = 1 requires a Grid1D")
        if complex(p.z) == 0:
            raise ThresholdSingularity("the 1D free kernel has no limit at z = 0")
        w = sqrt_minus_z(p)
        x = grid.points
        entries = np.exp(-np.abs(x[:, None] - x[None, :]) * w) / (2.0 * w)
    elif d == 3:
        if not isinstance(grid, RadialGrid):
            raise TypeError("d = 3 requires a RadialGrid")
        w = sqrt_minus_z(p)
        r = grid.points
        entries = radial_reduced_kernel_3d(r[:, None], r[None, :], w)
    elif d == 2:
        if not isinstance(grid, RadialGrid):
            raise TypeError("d = 2 requires a RadialGrid")
        z = complex(p.z)
        if z.imag == 0.0 and z.real >= 0.0:
            raise UnsupportedSpectralPoint("2D kernel requires z off the closed positive axis")
        w = sqrt_minus_z(p)
        r = grid.points
        entries = radial_reduced_kernel_2d(r[:, None], r[None, :], w)
    else:
        raise ValueError(f"unsupported dimension d = {d}")
    if np.all(np.abs(entries.imag) == 0.0):
        entries = entries.real
    return KernelOperator(grid, grid, entries)
