"""Null-state / weighted-spectral-gap dichotomy for nonnegative forms.

For a nonnegative Schrödinger form a[u] = int(|u'|^2 + V |u|^2) either some
positive weight w has int w |u|^2 <= a[u] (subcritical: weighted spectral
gap) or compactly supported arbitrarily small negative perturbations produce
negative eigenvalues whose sup-normalized ground states converge on compacts
to a positive generalized zero-energy solution (critical: null state).

The construction follows the perturbation route: W_j = (1/j) 1_{|x| <= K},
smallest eigenpair of H - W_j per j, Cauchy convergence of the normalized
eigenfunctions on the compact window.  The weighted gap search uses the
one-parameter family w = c <x>^{-4} and bisects the largest admissible c,
reporting half of it so the margin is strictly positive.

All operators are Dirichlet truncations on uniform grids; verdicts are
re-checked under doubling of the truncation radius.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidOperator
from .weighted_space import Grid1D, RadialGrid, weight

_CELL_NODES, _CELL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def _cell_average(sampler: Callable, points: np.ndarray, h: float) -> np.ndarray:
    vals = np.zeros(points.shape, dtype=float)
    for node, wgt in zip(_CELL_NODES, _CELL_WEIGHTS):
        sampled = np.asarray(sampler(points + 0.5 * h * node))
        if np.max(np.abs(np.imag(sampled))) > 1e-14 * max(1.0, np.max(np.abs(sampled))):
            raise InvalidOperator("criticality analysis requires a real potential")
        vals += wgt * sampled.real
    return vals / 2.0


@dataclass(frozen=True)
class QuadraticForm:
    """Discrete form a[u] = h sum |du/h|^2 + h sum V u^2 with Dirichlet edges."""

    kind: str  # "line" | "radial3d"
    grid: object
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in ("line", "radial3d"):
            raise ValueError("kind must be 'line' or 'radial3d'")
        if self.v.shape != self.grid.points.shape:
            raise ValueError("potential samples must match the grid")
        lam = self.smallest_eigenvalue()
        if lam < -1e-10:
            raise InvalidOperator(
                f"form is not nonnegative: smallest eigenvalue {lam:.3g}"
            )

    # interior = grid points with Dirichlet zeros outside
    def _interior(self):
        if self.kind == "line":
            return slice(1, -1)
        return slice(0, -1)  # radial: r=0 Dirichlet is implicit, drop r=R

    def tridiagonal(self, extra_potential: np.ndarray | None = None):
        h = self.grid.spacing
        v = self.v if extra_potential is None else self.v + extra_potential
        sl = self._interior()
        d = 2.0 / h**2 + v[sl]
        n_int = d.size
        e = np.full(n_int - 1, -1.0 / h**2)
        return d, e

    def smallest_eigenpair(self, extra_potential: np.ndarray | None = None):
        d, e = self.tridiagonal(extra_potential)
        vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
        lam = float(vals[0])
        psi_int = vecs[:, 0]
        psi = np.zeros(self.grid.n_points)
        psi[self._interior()] = psi_int
        peak = np.argmax(np.abs(psi))
        psi = psi * np.sign(psi[peak])
        return lam, psi / np.max(np.abs(psi))

    def smallest_eigenvalue(self, extra_potential: np.ndarray | None = None) -> float:
        d, e = self.tridiagonal(extra_potential)
        vals = eigh_tridiagonal(d, e, select="i", select_range=(0, 0),
                                eigvals_only=True)
        return float(vals[0])

    def apply_form(self, u: np.ndarray) -> float:
        h = self.grid.spacing
        u = np.asarray(u, dtype=float)
        padded = np.concatenate([[0.0], u, [0.0]])  # Dirichlet beyond the edges
        grad = np.sum(np.diff(padded) ** 2) / h
        return float(grad + h * np.sum(self.v * u * u))

    def apply_operator(self, u: np.ndarray) -> np.ndarray:
        h = self.grid.spacing
        padded = np.concatenate([[0.0], u, [0.0]])
        return (-(padded[2:] - 2 * padded[1:-1] + padded[:-2]) / h**2
                + self.v * u)

    @staticmethod
    def free_line(half_width: float = 320.0, n_points: int = 12801) -> "QuadraticForm":
        grid = Grid1D(half_width, n_points)
        form = QuadraticForm("line", grid, np.zeros(grid.n_points))
        object.__setattr__(form, "_factory", lambda r, n: QuadraticForm.free_line(r, n))
        return form

    @staticmethod
    def from_potential_line(sampler: Callable, half_width: float = 320.0,
                            n_points: int = 12801) -> "QuadraticForm":
        grid = Grid1D(half_width, n_points)
        v = _cell_average(sampler, grid.points, grid.spacing)
        form = QuadraticForm("line", grid, v)
        object.__setattr__(
            form, "_factory",
            lambda r, n: QuadraticForm.from_potential_line(sampler, r, n))
        return form

    @staticmethod
    def free_radial3d(max_radius: float = 320.0, n_points: int = 12800) -> "QuadraticForm":
        grid = RadialGrid(max_radius, n_points)
        form = QuadraticForm("radial3d", grid, np.zeros(grid.n_points))
        object.__setattr__(form, "_factory",
                           lambda r, n: QuadraticForm.free_radial3d(r, n))
        return form

    @staticmethod
    def from_potential_radial3d(sampler: Callable, max_radius: float = 320.0,
                                n_points: int = 12800) -> "QuadraticForm":
        grid = RadialGrid(max_radius, n_points)
        v = _cell_average(sampler, grid.points, grid.spacing)
        form = QuadraticForm("radial3d", grid, v)
        object.__setattr__(
            form, "_factory",
            lambda r, n: QuadraticForm.from_potential_radial3d(sampler, r, n))
        return form

    def radius(self) -> float:
        return (self.grid.half_width if self.kind == "line"
                else self.grid.max_radius)

    def with_doubled_radius(self) -> "QuadraticForm":
        factory = getattr(self, "_factory", None)
        if factory is None:
            raise InvalidOperator("form was not built by a doubling-aware constructor")
        return factory(2.0 * self.radius(), 2 * (self.grid.n_points - 1) + 1
                       if self.kind == "line" else 2 * self.grid.n_points)


class Dichotomy(enum.Enum):
    NULL_STATE = "null_state"
    WEIGHTED_GAP = "weighted_gap"
    INCONCLUSIVE = "inconclusive"


@dataclass
class DichotomyResult:
    verdict: Dichotomy
    phi: np.ndarray | None = None
    weight_coefficient: float | None = None
    weight: np.ndarray | None = None
    margin: float | None = None
    residual: float | None = None
    trace: list = field(default_factory=list)  # rows (j, lambda_j, sup_dist_to_limit)
    diagnostics: dict = field(default_factory=dict)


def hardy_gap_check(form: QuadraticForm, w: np.ndarray) -> tuple[bool, float]:
    """Whether int w|u|^2 <= a[u] holds discretely; margin is the smallest
    eigenvalue of H - w under Dirichlet truncation."""
    w = np.asarray(w, dtype=float)
    if w.shape != form.grid.points.shape:
        raise ValueError("weight samples must match the grid")
    if np.any(w < 0):
        raise ValueError("weight must be nonnegative")
    mu = form.smallest_eigenvalue(extra_potential=-w)
    return bool(mu >= -1e-10), mu


def _weighted_gap_search(form: QuadraticForm) -> tuple[float, np.ndarray, float]:
    """Largest c with H - c <x>^{-4} nonnegative, halved for a positive margin."""
    base = weight(form.grid.points, -4.0)
    lo, hi = 0.0, 1.0
    for _ in range(40):
        if form.smallest_eigenvalue(-hi * base) < -1e-10:
            break
        lo = hi
        hi *= 2.0
    else:
        raise InvalidOperator("weighted-gap search did not bracket a critical coupling")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if form.smallest_eigenvalue(-mid * base) >= -1e-10:
            lo = mid
        else:
            hi = mid
    c_star = lo
    if c_star <= 0.0:
        raise InvalidOperator("no positive weighted gap found")
    c = 0.5 * c_star
    margin = form.smallest_eigenvalue(-c * base)
    return c, c * base, margin


def null_state_iteration(form: QuadraticForm, compact_radius: float = 1.0,
                         j_max: int = 64, conv_tol: float = 0.02,
                         stability_check: bool = True) -> DichotomyResult:
    """Dichotomy by compact negative perturbations W_j = (1/j) 1_{|x| <= K}.

    All sampled j trigger a negative eigenvalue -> the sup-normalized ground
    states must converge on |x| <= K and their limit is the null state; any
    j failing to bind sends the search to the weighted-gap branch.  The
    verdict is re-derived on a radius-doubled grid when stability_check is
    set, and a disagreement downgrades it to Inconclusive.
    """
    result = _dichotomy_once(form, compact_radius, j_max, conv_tol)
    if stability_check and result.verdict is not Dichotomy.INCONCLUSIVE:
        bigger = form.with_doubled_radius()
        again = _dichotomy_once(bigger, compact_radius, j_max, conv_tol)
        result.diagnostics["doubled_verdict"] = again.verdict.value
        if again.verdict is not result.verdict:
            return DichotomyResult(
                Dichotomy.INCONCLUSIVE, trace=result.trace,
                diagnostics={"reason": "verdict unstable under radius doubling",
                             "base": result.verdict.value,
                             "doubled": again.verdict.value})
    return result


def _dichotomy_once(form: QuadraticForm, compact_radius: float, j_max: int,
                    conv_tol: float) -> DichotomyResult:
    x = form.grid.points
    h = form.grid.spacing
    window = np.abs(x) <= compact_radius
    js, lams, states = [], [], []
    j = 1
    while j <= j_max:
        wj = _cell_average(
            lambda t: (np.abs(t) <= compact_radius).astype(float), x, h) / j
        lam, psi = form.smallest_eigenpair(extra_potential=-wj)
        js.append(j)
        lams.append(lam)
        states.append(psi)
        if lam >= -1e-12:
            c, w, margin = _weighted_gap_search(form)
            trace = [(jj, ll, np.nan) for jj, ll in zip(js, lams)]
            return DichotomyResult(Dichotomy.WEIGHTED_GAP, weight_coefficient=c,
                                   weight=w, margin=margin, trace=trace,
                                   diagnostics={"first_nonbinding_j": j})
        j *= 2
    dists = [float(np.max(np.abs((states[i] - states[i - 1])[window])))
             for i in range(1, len(states))]
    phi = states[-1]
    trace = [(jj, ll, float(np.max(np.abs((st - phi)[window]))))
             for jj, ll, st in zip(js, lams, states)]
    if dists and dists[-1] <= conv_tol:
        residual = float(np.max(np.abs(form.apply_operator(phi)[window])))
        return DichotomyResult(Dichotomy.NULL_STATE, phi=phi, residual=residual,
                               trace=trace,
                               diagnostics={"final_increment": dists[-1]})
    return DichotomyResult(Dichotomy.INCONCLUSIVE, trace=trace,
                           diagnostics={"reason": "no Cauchy convergence",
                                        "increments": dists})


def trace_csv(result: DichotomyResult) -> str:
    lines = ["j,lambda,sup_dist_to_limit"]
    for j, lam, dist in result.trace:
        lines.append(f"{j},{lam:.15g},{dist:.15g}")
    return "\n".join(lines) + "\n"
