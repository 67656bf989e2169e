"""Sweeps, exponent fits, classification, resolvent consistency."""

import numpy as np
import pytest

from virtlev.errors import ConfigError, FitError, NearSpectrum
from virtlev.free_resolvent import SpectralParameter, build_free_kernel_operator
from virtlev.jost import Potential1D, green_kernel, jost_pair
from virtlev.lap_sweep import (
    OperatorSpec,
    SweepConfig,
    apply_shifted_operator,
    classify,
    discrete_hamiltonian,
    fit_exponent,
    fit_log_divergence,
    resolvent_matrix,
    sweep,
    sweep_csv,
)
from virtlev.reports import Classification
from virtlev.weighted_space import Grid1D, IndexGrid, KernelOperator, RadialGrid, operator_norm_weighted

GRID = Grid1D(16.0, 3201)  # h = 0.01
SUITE_RADII = tuple(3e-2 * 10 ** (-0.5 * k) for k in range(7))


def zero_potential(grid=GRID):
    return Potential1D(1.0, lambda x: np.zeros(np.shape(x)), grid)


class TestResolventMatrix:
    def test_free1d_matches_kernel_formula(self):
        k = resolvent_matrix(OperatorSpec.free1d(GRID), -1.0)
        ref = build_free_kernel_operator(1, GRID, SpectralParameter.interior(-1.0))
        assert np.max(np.abs(k.entries - ref.entries)) < 1e-10

    def test_schrodinger_free_consistency_order_h2(self):
        errs = []
        for grid in (Grid1D(8.0, 1601), Grid1D(8.0, 3201)):
            pot = zero_potential(grid)
            s = resolvent_matrix(OperatorSpec.schrodinger1d(pot), -1.0)
            ref = build_free_kernel_operator(1, grid, SpectralParameter.interior(-1.0))
            errs.append(np.max(np.abs(s.entries - ref.entries)))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)

    def test_schrodinger_matches_jost_green_kernel_at_threshold(self):
        grid = Grid1D(8.0, 1601)
        pot = Potential1D.square_well(-1.0, grid)
        gk = green_kernel(jost_pair(pot, 0.0))
        scale = np.max(np.abs(gk.entries))
        err6 = np.max(np.abs(
            resolvent_matrix(OperatorSpec.schrodinger1d(pot), -1e-6).entries
            - gk.entries))
        err8 = np.max(np.abs(
            resolvent_matrix(OperatorSpec.schrodinger1d(pot), -1e-8).entries
            - gk.entries))
        # O(h^2) + O(sqrt|z|): the sqrt-z part dominates and shrinks 10x
        assert err8 < 0.2 * err6
        assert err8 < 5e-3 * scale

    def test_schrodinger3d_free_consistency(self):
        grid = RadialGrid(10.0, 1000)
        free = resolvent_matrix(OperatorSpec.free3d_radial(grid), -0.5)
        schrod = resolvent_matrix(
            OperatorSpec.schrodinger3d_radial(grid, lambda r: np.zeros(np.shape(r)),
                                              support=1.0), -0.5)
        assert np.max(np.abs(free.entries - schrod.entries)) < 5e-4

    def test_near_spectrum_raises(self):
        # hit the bound state of a deep well: the Dirichlet eigenvalue of the
        # lattice operator agrees with the transparent-closure one to ~e^{-2 kappa R}
        from scipy.linalg import eigh_tridiagonal
        pot = Potential1D.square_well(2.0, GRID)
        spec = OperatorSpec.schrodinger1d(pot)
        h = GRID.spacing
        t = discrete_hamiltonian(spec, 0.0).toarray()
        e_h = float(eigh_tridiagonal(np.real(np.diag(t))[1:-1],
                                     np.full(GRID.n_points - 3, -1.0 / h**2),
                                     select="i", select_range=(0, 0),
                                     eigvals_only=True)[0])
        assert e_h < -0.5
        with pytest.raises(NearSpectrum):
            resolvent_matrix(spec, e_h)

    def test_resolution_contract_enforced(self):
        coarse = Grid1D(16.0, 801)  # h = 0.04 > 0.01
        with pytest.raises(ConfigError):
            resolvent_matrix(OperatorSpec.free1d(coarse), -1.0)


class TestSweepConfig:
    def test_requires_five_radii_three_decades(self):
        with pytest.raises(ConfigError):
            SweepConfig(radii=(1e-2, 1e-3, 1e-4))
        with pytest.raises(ConfigError):
            SweepConfig(radii=(1e-2, 5e-3, 2e-3, 1e-3, 5e-4))

    def test_rejects_points_on_the_cut(self):
        with pytest.raises(ConfigError):
            SweepConfig(z0=1.0, angle=0.0)

    def test_default_radii_geometry(self):
        cfg = SweepConfig()
        assert len(cfg.radii) == 9
        assert cfg.radii[0] == pytest.approx(1e-2)
        ratios = np.diff(np.log10(np.array(cfg.radii)))
        assert np.allclose(ratios, -0.5)

    def test_axis_rays_are_exact(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi)
        assert cfg.point(1e-3) == -1e-3
        cfg2 = SweepConfig(z0=1.0, angle=np.pi / 2)
        assert cfg2.point(1e-3) == 1.0 + 1e-3j


class TestFits:
    def test_exact_power_law(self):
        pts = [(r, 3.0 * r**-0.5) for r in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
        alpha, r2 = fit_exponent(pts)
        assert alpha == pytest.approx(0.5, abs=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_constant_norms(self):
        pts = [(r, 7.0) for r in (1e-2, 1e-3, 1e-4, 1e-5)]
        alpha, r2 = fit_exponent(pts)
        assert alpha == pytest.approx(0.0, abs=1e-12)
        assert r2 == 1.0

    def test_exact_log_growth(self):
        pts = [(r, 2.0 + 0.5 * np.log(1 / r)) for r in (1e-2, 1e-3, 1e-4, 1e-5)]
        slope, r2 = fit_log_divergence(pts)
        assert slope == pytest.approx(0.5, abs=1e-12)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_fit_errors(self):
        with pytest.raises(FitError):
            fit_exponent([(1e-2, 1.0), (1e-3, 2.0)])
        with pytest.raises(FitError):
            fit_exponent([(1e-2, 1.0)] * 5)
        with pytest.raises(FitError):
            fit_exponent([(1e-2, -1.0), (1e-3, 1.0), (1e-4, 1.0), (1e-5, 1.0)])


class TestSweep:
    def test_free1d_divergence_rate(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi, s=2.0, sp=2.0)
        res = sweep(OperatorSpec.free1d(Grid1D(20.0, 4001)), cfg)
        alpha, r2 = fit_exponent(res)
        assert 0.45 <= alpha <= 0.55
        assert r2 >= 0.99

    def test_implicit_norm_matches_dense_operator_norm(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi, radii=SUITE_RADII, s=1.5, sp=1.0)
        op = OperatorSpec.free3d_radial(RadialGrid(10.0, 1000))
        res = sweep(op, cfg)
        k = resolvent_matrix(op, cfg.point(SUITE_RADII[0]))
        dense = operator_norm_weighted(k, 1.5, 1.0)
        assert res.norms()[0] == pytest.approx(dense, rel=1e-7)

    def test_shift_truncation_l1_linf_bounded_by_one(self):
        from virtlev.discrete_ops import truncated_resolvent_matrix
        # the truncated shift models a Matrix operator; its resolvent is
        # rebuilt per sweep point from the lattice formula
        lmat = np.diag(np.ones(63), 1)
        cfg = SweepConfig(z0=1.0, angle=0.25 * np.pi,
                          radii=tuple(0.5 * 10 ** (-0.5 * k) for k in range(8)),
                          flavor="l1_linf")
        res = sweep(OperatorSpec.from_matrix(lmat), cfg)
        for p in res.points:
            assert p.norm <= 1.0 + 1e-12
            ref = np.max(np.abs(truncated_resolvent_matrix(p.z, 64)))
            assert p.norm == pytest.approx(ref, rel=1e-10)

    def test_aborts_with_partial_results(self):
        from scipy.linalg import eigh_tridiagonal
        pot = Potential1D.square_well(2.0, GRID)
        spec = OperatorSpec.schrodinger1d(pot)
        h = GRID.spacing
        t = discrete_hamiltonian(spec, 0.0).toarray()
        e_h = float(eigh_tridiagonal(np.real(np.diag(t))[1:-1],
                                     np.full(GRID.n_points - 3, -1.0 / h**2),
                                     select="i", select_range=(0, 0),
                                     eigvals_only=True)[0])
        # a sweep down the negative axis that lands exactly on the bound state
        radii = tuple(sorted((2.0, 1.0, -e_h, 0.05, 0.02, 0.005, 0.002),
                             reverse=True))
        cfg = SweepConfig(z0=0.0, angle=np.pi, radii=radii)
        res = sweep(spec, cfg)
        assert res.aborted is not None
        assert 0 < len(res.points) < len(radii)

    def test_workers_match_sequential(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi, radii=SUITE_RADII, s=2.0, sp=2.0)
        op = OperatorSpec.free1d(Grid1D(20.0, 4001))
        seq = sweep(op, cfg, workers=1).norms()
        par = sweep(op, cfg, workers=4).norms()
        assert np.allclose(seq, par, rtol=1e-9)


class TestClassify:
    def test_free1d_virtual_power(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi, s=2.0, sp=2.0)
        rep = classify(OperatorSpec.free1d(Grid1D(20.0, 4001)), cfg)
        assert rep.classification is Classification.VIRTUAL
        assert rep.divergence == "power"
        assert rep.rank == 1
        state = rep.states[0]
        inner = np.abs(Grid1D(20.0, 4001).points) <= 10.0
        assert np.max(np.abs(state[inner] - 1.0)) < 0.05

    def test_free3d_regular(self):
        cfg = SweepConfig(z0=0.0, angle=np.pi, s=1.1, sp=1.1)
        rep = classify(OperatorSpec.free3d_radial(RadialGrid(30.0, 3000)), cfg)
        assert rep.classification is Classification.REGULAR

    def test_free3d_norms_bounded_with_monotone_limit(self):
        # at s = s' = 1.1 the threshold norm limit exists and is approached
        # monotonically from below (slowly, like |z|^0.1)
        cfg = SweepConfig(z0=0.0, angle=np.pi, s=1.1, sp=1.1)
        res = sweep(OperatorSpec.free3d_radial(RadialGrid(30.0, 3000)), cfg)
        norms = res.norms()
        assert np.all(np.diff(norms) > 0)
        assert norms.max() < 10.0
        increments = np.diff(norms)
        assert np.all(np.diff(increments) < 0)  # decelerating growth

    def test_free2d_virtual_log(self):
        radii = tuple(1e-2 * 10 ** (-0.5 * k) for k in range(7))
        cfg = SweepConfig(z0=0.0, angle=np.pi, radii=radii, s=2.0, sp=2.0)
        rep = classify(OperatorSpec.free2d_radial(RadialGrid(10.0, 1000)), cfg,
                       refine=False)
        assert rep.classification is Classification.VIRTUAL
        assert rep.divergence == "log"

    def test_barrier_regular(self):
        pot = Potential1D.square_well(-1.0, GRID)
        cfg = SweepConfig(z0=0.0, angle=np.pi / 2, radii=SUITE_RADII, s=2.0, sp=2.0)
        rep = classify(OperatorSpec.schrodinger1d(pot), cfg)
        assert rep.classification is Classification.REGULAR

    def test_exact_kernel_vector_reported_with_residual(self):
        # the discrete operator at z = 0 annihilates constants exactly
        cfg = SweepConfig(z0=0.0, angle=np.pi, s=2.0, sp=2.0)
        op = OperatorSpec.free1d(Grid1D(20.0, 4001))
        rep = classify(op, cfg)
        assert rep.classification is Classification.VIRTUAL
        resid = apply_shifted_operator(op, 0.0, np.ones(4001))
        assert np.max(np.abs(resid)) < 1e-12
        # the swept state carries O(sqrt r_min) contamination; it must be
        # certified within the report's residual tolerance
        assert rep.diagnostics["state_residual"] < 0.02


class TestAdjointSymmetry:
    def test_weighted_norm_conjugate_transpose(self):
        rng = np.random.default_rng(11)
        grid = Grid1D(6.0, 121)
        for _ in range(10):
            m = rng.standard_normal((121, 121)) + 1j * rng.standard_normal((121, 121))
            s, sp_ = 3 * rng.random(), 3 * rng.random()
            a = operator_norm_weighted(KernelOperator(grid, grid, m), s, sp_)
            b = operator_norm_weighted(KernelOperator(grid, grid, m.conj().T), sp_, s)
            assert b == pytest.approx(a, rel=1e-10)

    def test_resolvent_adjoint_symmetry(self):
        pot = Potential1D.square_well(0.4 + 0.3j, GRID)
        k = resolvent_matrix(OperatorSpec.schrodinger1d(pot), 1e-3j)
        a = operator_norm_weighted(k, 2.0, 1.0, method="power")
        kh = KernelOperator(GRID, GRID, k.entries.conj().T)
        b = operator_norm_weighted(kh, 1.0, 2.0, method="power")
        assert b == pytest.approx(a, rel=1e-8)


class TestRegularizerIndependence:
    def test_difference_of_regularized_solutions_flat_outside_support(self):
        """Two different regularizations of the threshold problem produce
        solutions differing by a discrete-harmonic (affine, here constant)
        function outside the perturbation supports."""
        import scipy.sparse as sp
        import scipy.sparse.linalg as spla

        grid = Grid1D(20.0, 4001)
        x = grid.points
        h = grid.spacing
        free = discrete_hamiltonian(OperatorSpec.free1d(grid), 0.0)
        f = np.exp(-4.0 * x**2)
        ind = (np.abs(x) <= 1.0).astype(float)
        bump = np.where(np.abs(x) <= 1.0, 1.0 + np.cos(np.pi * x), 0.0)
        h1 = sp.csc_matrix(free + sp.diags(bump))
        h2 = sp.csc_matrix(free + h * np.outer(ind, ind))
        u1 = spla.spsolve(h1, f)
        u2 = spla.spsolve(h2, f)
        diff = u1 - u2
        lap = (diff[2:] - 2 * diff[1:-1] + diff[:-2]) / h**2
        outside = np.abs(x[1:-1]) > 1.5
        assert np.max(np.abs(lap[outside])) < 1e-8
        # the same virtual-state space: both differences from a third
        # regularization are flat outside as well
        h3 = sp.csc_matrix(free + sp.diags(0.5 * ind))
        u3 = spla.spsolve(h3, f)
        lap3 = ((u1 - u3)[2:] - 2 * (u1 - u3)[1:-1] + (u1 - u3)[:-2]) / h**2
        assert np.max(np.abs(lap3[outside])) < 1e-8


class TestAgreementWithJost:
    @pytest.mark.parametrize("g,expected", [
        (0.5, Classification.REGULAR),
        (np.pi**2 / 4.0, Classification.VIRTUAL),
        (4.0, Classification.REGULAR),
    ])
    def test_square_wells(self, g, expected):
        from virtlev.jost import classify_threshold_1d
        fine = Grid1D(16.0, 6401)
        jrep = classify_threshold_1d(Potential1D.square_well(g, fine))
        cfg = SweepConfig(z0=0.0, angle=np.pi / 2, radii=SUITE_RADII, s=2.0, sp=2.0)
        lrep = classify(OperatorSpec.schrodinger1d(Potential1D.square_well(g, GRID)), cfg)
        assert jrep.classification is expected
        assert lrep.classification is expected


def test_sweep_csv_format():
    cfg = SweepConfig(z0=0.0, angle=np.pi, radii=SUITE_RADII, s=2.0, sp=2.0)
    res = sweep(OperatorSpec.free1d(Grid1D(20.0, 4001)), cfg)
    text = sweep_csv(res)
    lines = text.strip().split("\n")
    assert lines[0] == "radius,norm,z_re,z_im"
    assert len(lines) == 1 + len(SUITE_RADII)
    r, n, zr, zi = lines[1].split(",")
    assert float(r) == pytest.approx(3e-2)
    assert float(zr) == pytest.approx(-3e-2)
    assert float(zi) == 0.0


def test_matrix_spec_validation():
    with pytest.raises(ConfigError):
        OperatorSpec.from_matrix(np.zeros((3, 4)))
    spec = OperatorSpec.from_matrix(np.diag([1.0, 2.0]))
    assert isinstance(spec.grid, IndexGrid)


def test_classify_inconclusive_on_short_aborted_sweep():
    from scipy.linalg import eigh_tridiagonal
    pot = Potential1D.square_well(2.0, GRID)
    spec = OperatorSpec.schrodinger1d(pot)
    h = GRID.spacing
    t = discrete_hamiltonian(spec, 0.0).toarray()
    e_h = float(eigh_tridiagonal(np.real(np.diag(t))[1:-1],
                                 np.full(GRID.n_points - 3, -1.0 / h**2),
                                 select="i", select_range=(0, 0),
                                 eigvals_only=True)[0])
    radii = tuple(sorted((3.0, 2.0, -e_h, 0.5, 0.1, 0.01, 0.003), reverse=True))
    cfg = SweepConfig(z0=0.0, angle=np.pi, radii=radii)
    rep = classify(spec, cfg, refine=False)
    assert rep.classification is Classification.INCONCLUSIVE
    assert rep.diagnostics.get("aborted") or rep.diagnostics.get("reason")


class TestBulkSpectrum:
    """Points in the interior of the essential spectrum are regular: the
    resolvent boundary values from either half-plane exist, so sweeps onto
    the positive axis must flatten out."""

    def test_1d_bulk_point_regular(self):
        radii = tuple(1e-2 * 10 ** (-0.5 * k) for k in range(7))
        cfg = SweepConfig(z0=1.0, angle=np.pi / 2, radii=radii, s=2.0, sp=2.0)
        rep = classify(OperatorSpec.free1d(Grid1D(20.0, 4001)), cfg)
        assert rep.classification is Classification.REGULAR
        assert abs(rep.alpha) < 0.02

    def test_3d_bulk_point_norms_converge(self):
        radii = tuple(1e-2 * 10 ** (-0.5 * k) for k in range(7))
        cfg = SweepConfig(z0=1.0, angle=np.pi / 2, radii=radii, s=2.0, sp=2.0)
        res = sweep(OperatorSpec.free3d_radial(RadialGrid(30.0, 3000)), cfg)
        norms = res.norms()
        assert (norms.max() - norms.min()) / norms.min() < 0.01
