from __future__ import annotations

import math

import numpy as np
import pytest

from hypcap.bie import (
    BoundaryGrid,
    CircularDomain,
    ConfigurationError,
    IterativeSolveError,
    SolverConfig,
    assemble,
    auto_alpha,
    auto_oversample,
    build_grid,
    compute_h,
    default_alpha,
    kernel_M_cont,
    kernel_N,
    resolve_alpha,
    solve_mu,
    wittich_matrix,
)
from hypcap.capacity import gamma_for


def two_disk_domain() -> CircularDomain:
    return CircularDomain(centers=(-0.4 + 0j, 0.4 + 0.1j), radii=(0.15, 0.2))


class TestCircularDomain:
    def test_contains(self):
        d = two_disk_domain()
        assert d.contains(0j)
        assert not d.contains(-0.4 + 0j)
        assert not d.contains(1.2 + 0j)

    def test_rejects_overlap(self):
        with pytest.raises(ValueError):
            CircularDomain(centers=(0j, 0.1 + 0j), radii=(0.2, 0.2))

    def test_rejects_touching(self):
        with pytest.raises(ValueError):
            CircularDomain(centers=(-0.2 + 0j, 0.2 + 0j), radii=(0.2, 0.2))

    def test_rejects_boundary_reach(self):
        with pytest.raises(ValueError):
            CircularDomain(centers=(0.9 + 0j,), radii=(0.1,))


class TestSolverConfig:
    def test_rejects_odd_n(self):
        with pytest.raises(ConfigurationError):
            SolverConfig(n=7)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ConfigurationError):
            SolverConfig(mode="magic")

    def test_rejects_bad_oversample(self):
        with pytest.raises(ConfigurationError):
            SolverConfig(quad_oversample=0)


class TestBuildGrid:
    def test_layout_and_values(self):
        d = two_disk_domain()
        n = 16
        g = build_grid(d, n)
        assert g.eta.shape == (3 * n,)
        # outer circle, positively oriented
        assert g.eta[0] == pytest.approx(1.0 + 0j)
        assert np.allclose(np.abs(g.eta[g.component(0)]), 1.0)
        # inner circles, clockwise about their centers
        inner = g.eta[g.component(1)]
        assert np.allclose(np.abs(inner - d.centers[0]), d.radii[0])
        assert (inner[1] - d.centers[0]).imag < 0.0

    def test_derivatives_match_finite_differences(self):
        d = two_disk_domain()
        g = build_grid(d, 256)
        hs = 2.0 * np.pi / 256
        for comp in range(3):
            sl = g.component(comp)
            eta = g.eta[sl]
            fd = (np.roll(eta, -1) - np.roll(eta, 1)) / (2 * hs)
            assert np.allclose(fd, g.etap[sl], atol=1e-3)
        # exact second derivative relation for circles: eta'' = -eta + const part
        assert np.allclose(g.etapp[g.component(0)], -g.eta[g.component(0)])

    def test_rejects_odd_n(self):
        with pytest.raises(ConfigurationError):
            build_grid(two_disk_domain(), 10 + 1)


class TestAlpha:
    def test_default_alpha_origin(self):
        assert default_alpha(two_disk_domain()) == 0j

    def test_default_alpha_covered(self):
        d = CircularDomain(centers=(0j,), radii=(0.3,))
        with pytest.raises(ConfigurationError):
            default_alpha(d)

    def test_auto_alpha_clearance(self):
        d = CircularDomain(centers=(0j,), radii=(0.3,))
        a = auto_alpha(d)
        assert d.contains(a)
        assert abs(a) - 0.3 > 0.1 and 1.0 - abs(a) > 0.1

    def test_resolve_alpha(self):
        d = two_disk_domain()
        assert resolve_alpha(d, None) == 0j
        assert resolve_alpha(d, 0.1 + 0.1j) == 0.1 + 0.1j
        assert d.contains(resolve_alpha(d, "auto"))
        with pytest.raises(ConfigurationError):
            resolve_alpha(d, "magic")
        with pytest.raises(ConfigurationError):
            resolve_alpha(d, -0.4 + 0j)  # inside an excluded disk


class TestKernels:
    def test_diagonal_is_analytic_limit(self):
        d = two_disk_domain()
        a = 0.1j
        for comp in range(3):
            s = 1.0
            lim = kernel_N(d, a, comp, s, comp, s)
            near = kernel_N(d, a, comp, s, comp, s + 1e-6)
            assert near == pytest.approx(lim, abs=1e-4)
            lim_m = kernel_M_cont(d, a, comp, s, comp, s)
            near_m = kernel_M_cont(d, a, comp, s, comp, s + 1e-6)
            assert near_m == pytest.approx(lim_m, abs=1e-4)

    def test_cross_component_bounded(self):
        d = two_disk_domain()
        a = 0j
        vals = [
            abs(kernel_N(d, a, 0, s, 1, t)) + abs(kernel_M_cont(d, a, 0, s, 1, t))
            for s in np.linspace(0, 2 * np.pi, 7)
            for t in np.linspace(0, 2 * np.pi, 7)
        ]
        assert max(vals) < 50.0

    def test_alpha_checked(self):
        with pytest.raises(ConfigurationError):
            kernel_N(two_disk_domain(), 2.0 + 0j, 0, 0.0, 0, 0.0)


class TestWittich:
    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_exact_on_trig_polynomials(self, n):
        s = 2.0 * np.pi * np.arange(n) / n
        w = wittich_matrix(n)
        assert np.max(np.abs(w @ np.ones(n))) < 1e-13
        for k in range(1, n // 2):
            assert np.max(np.abs(w @ np.cos(k * s) - np.sin(k * s))) < 1e-13
            assert np.max(np.abs(w @ np.sin(k * s) + np.cos(k * s))) < 1e-13

    def test_rejects_odd_n(self):
        with pytest.raises(ConfigurationError):
            wittich_matrix(6 + 1)


class TestAssemble:
    def test_matrix_shapes(self):
        d = two_disk_domain()
        g = build_grid(d, 32)
        op = assemble(g, 0j)
        assert op.n_mat.shape == (96, 96)
        assert op.m_mat.shape == (96, 96)

    def test_constant_vector_matches_fine_quadrature(self):
        d = two_disk_domain()
        n = 64
        g = build_grid(d, n)
        op = assemble(g, 0.1j)
        got = op.n_mat @ np.ones(3 * n)
        # independent oracle: direct trapezoidal quadrature of the smooth
        # kernel on a much finer t-grid
        nf = 1024
        tf = 2.0 * np.pi * np.arange(nf) / nf
        w = 2.0 * np.pi / nf
        for comp_s, idx in ((0, 3), (1, n + 5), (2, 2 * n + 7)):
            s = float(g.s[idx % n])
            total = 0.0
            for comp_t in range(3):
                total += w * sum(
                    kernel_N(d, 0.1j, comp_s, s, comp_t, float(t)) for t in tf
                )
            assert got[idx] == pytest.approx(total, abs=1e-12)

    def test_oversampling_agrees_on_well_separated_domain(self):
        d = two_disk_domain()
        g = build_grid(d, 64)
        op1 = assemble(g, 0j, quad_oversample=1)
        op2 = assemble(g, 0j, quad_oversample=2)
        gamma = gamma_for(g, 0)
        mu1 = solve_mu(op1, gamma)
        mu2 = solve_mu(op2, gamma)
        assert np.max(np.abs(mu1 - mu2)) < 1e-10

    def test_auto_oversample_bounds(self):
        d = two_disk_domain()
        assert 1 <= auto_oversample(d, 0j, 128) <= 8
        # nearly touching disks force refinement at small n
        tight = CircularDomain(centers=(-0.2005 + 0j, 0.2005 + 0j), radii=(0.2, 0.2))
        assert auto_oversample(tight, 0.0 + 0.9j, 16) > 1


class TestSolve:
    def test_direct_and_iterative_agree(self):
        d = two_disk_domain()
        g = build_grid(d, 64)
        op = assemble(g, 0j)
        gamma = gamma_for(g, 0)
        mu_d = solve_mu(op, gamma, SolverConfig(n=64, mode="direct"))
        info: dict = {}
        mu_i = solve_mu(op, gamma, SolverConfig(n=64, mode="iterative"), info)
        assert np.max(np.abs(mu_d - mu_i)) < 1e-12
        assert info["iterations"] is not None and info["iterations"][0] > 0

    def test_multicolumn_matches_loop(self):
        d = two_disk_domain()
        g = build_grid(d, 32)
        op = assemble(g, 0j)
        gam = np.stack([gamma_for(g, 0), gamma_for(g, 1)], axis=1)
        mu = solve_mu(op, gam)
        for k in range(2):
            assert np.allclose(mu[:, k], solve_mu(op, gam[:, k]), atol=1e-14)

    def test_length_mismatch(self):
        d = two_disk_domain()
        op = assemble(build_grid(d, 32), 0j)
        with pytest.raises(ValueError):
            solve_mu(op, np.ones(17))

    def test_h_constant_per_component(self):
        # the defining property of the solution: h is constant on each circle
        d = two_disk_domain()
        n = 128
        g = build_grid(d, n)
        op = assemble(g, 0j)
        for k in range(2):
            gamma = gamma_for(g, k)
            mu = solve_mu(op, gamma)
            h = compute_h(op, mu, gamma)
            for comp in range(3):
                block = h[g.component(comp)]
                assert np.std(block) < 1e-10

    def test_h_means_converge_with_n(self):
        # per-component means of h are the quantities the capacity system
        # consumes; they must be grid-converged well below solver tolerances
        d = two_disk_domain()
        means = []
        for n in (64, 128):
            g = build_grid(d, n)
            op = assemble(g, 0j)
            gamma = gamma_for(g, 0)
            h = compute_h(op, solve_mu(op, gamma), gamma)
            means.append([float(np.mean(h[g.component(c)])) for c in range(3)])
        assert np.allclose(means[0], means[1], atol=1e-12)
