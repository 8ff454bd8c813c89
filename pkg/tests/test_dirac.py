"""Continuum reference solver: spectral grid, Dirac right-hand side, RK2
time stepping, plane-wave spinors, Gaussian packets."""

import numpy as np
import pytest

from gaugewalk import dirac as dr
from gaugewalk import lattice as lat
from gaugewalk import unitary as un


def free_params(dim=2, mass=0.1):
    count = dim * dim
    zero = lambda t, x: np.zeros(count)
    return dr.DiracParams(mass, zero, zero, un.generators_u(dim))


def grid64():
    return dr.SpectralGrid(64, -3.2, 0.1)


class TestSpectralGrid:
    def test_from_lattice_shares_sites(self):
        spec = lat.LatticeSpec(0.25, 6, 4)
        grid = dr.SpectralGrid.from_lattice(spec)
        assert grid.n_points == spec.n_sites
        assert np.allclose(grid.positions(), spec.positions())

    def test_validation(self):
        with pytest.raises(ValueError):
            dr.SpectralGrid(4, 0.0, 0.1)
        with pytest.raises(ValueError):
            dr.SpectralGrid(16, 0.0, -0.1)

    def test_nyquist_derivative_zeroed(self):
        grid = grid64()
        sym = grid.derivative_symbol()
        assert sym[32] == 0.0
        assert sym[1] == pytest.approx(1j * 2 * np.pi / grid.length)

    def test_synthesize_single_mode(self):
        grid = grid64()
        k = grid.wavenumbers()[3]
        coeffs = np.zeros(grid.n_points, dtype=complex)
        coeffs[3] = 1.0
        assert np.max(np.abs(grid.synthesize(coeffs) - np.exp(1j * k * grid.positions()))) <= 1e-12


class TestSpectralDerivative:
    def test_constant(self):
        grid = grid64()
        f = dr.SpinorField(grid, 1, np.ones((64, 2), dtype=complex))
        assert np.max(np.abs(dr.spectral_derivative(f).values)) <= 1e-12

    def test_sine(self):
        grid = grid64()
        k = 4 * 2 * np.pi / grid.length
        x = grid.positions()
        vals = np.stack([np.sin(k * x), np.cos(k * x)], axis=1).astype(complex)
        d = dr.spectral_derivative(dr.SpinorField(grid, 1, vals))
        want = np.stack([k * np.cos(k * x), -k * np.sin(k * x)], axis=1)
        assert np.max(np.abs(d.values - want)) <= 1e-10


class TestDiracRhs:
    def test_free_plane_wave_matches_hamiltonian(self):
        # for psi = e^{ikx} v: d/dt psi = -i H(k) psi
        grid = grid64()
        k = grid.wavenumbers()[5]
        m = 0.3
        v = np.array([0.7, -0.2j])
        vals = np.exp(1j * k * grid.positions())[:, None] * v
        f = dr.SpinorField(grid, 1, vals)
        rhs = dr.dirac_rhs(f, free_params(dim=1, mass=m), 0.0)
        want = vals @ (-1j * dr.free_hamiltonian(k, m)).T
        assert np.max(np.abs(rhs.values - want)) <= 1e-11

    def test_potential_coupling(self):
        # uniform B0, B1: rhs gains +i(B0 -+ B1) on the -/+ blocks
        grid = grid64()
        gens = un.generators_u(2)
        c0 = np.array([0.1, 0.4, -0.2, 0.3])
        c1 = np.array([-0.5, 0.2, 0.0, 0.1])
        params = dr.DiracParams(0.0, lambda t, x: c0, lambda t, x: c1, gens)
        rng = np.random.default_rng(3)
        vals = rng.standard_normal((64, 4)) + 1j * rng.standard_normal((64, 4))
        f = dr.SpinorField(grid, 2, vals)
        rhs = dr.dirac_rhs(f, params, 0.0)
        d = dr.spectral_derivative(f)
        b0, b1 = gens.assemble(c0), gens.assemble(c1)
        want_minus = d.psi_minus + 1j * f.psi_minus @ (b0 - b1).T
        want_plus = -d.psi_plus + 1j * f.psi_plus @ (b0 + b1).T
        assert np.max(np.abs(rhs.psi_minus - want_minus)) <= 1e-12
        assert np.max(np.abs(rhs.psi_plus - want_plus)) <= 1e-12

    def test_dimension_check(self):
        grid = grid64()
        f = dr.SpinorField(grid, 1, np.ones((64, 2), dtype=complex))
        with pytest.raises(un.DimensionError):
            dr.dirac_rhs(f, free_params(dim=2), 0.0)


class TestRk2:
    def test_free_mode_second_order(self):
        # exact: e^{-i H(k) t}; the global error over fixed t drops ~4x per halving
        grid = grid64()
        k = grid.wavenumbers()[2]
        m = 0.5
        params = free_params(dim=1, mass=m)
        v = dr.u_plus(k, m)
        vals0 = np.exp(1j * k * grid.positions())[:, None] * v
        e = np.sqrt(k * k + m * m)
        t_final = 1.0
        exact = vals0 * np.exp(-1j * e * t_final)

        def error(dt):
            f = dr.SpinorField(grid, 1, vals0)
            f = dr.solve(f, params, t_final, dt)
            return np.max(np.abs(f.values - exact))

        ratio = error(0.02) / error(0.01)
        assert 3.2 <= ratio <= 4.8

    def test_dt_validated(self):
        grid = grid64()
        f = dr.SpinorField(grid, 1, np.ones((64, 2), dtype=complex))
        with pytest.raises(ValueError):
            dr.rk2_step(f, free_params(dim=1), 0.0, -0.1)


class TestPlaneWaveSpinors:
    def test_u_plus_rest_frame(self):
        assert np.allclose(dr.u_plus(0.0, 1.0), np.array([1, 1]) / np.sqrt(2))

    def test_u_plus_eigenvector(self):
        for k in (-3.0, -0.1, 0.0, 0.7, 12.0):
            m = 0.1
            u = dr.u_plus(k, m)
            e = np.sqrt(k * k + m * m)
            assert np.max(np.abs(dr.free_hamiltonian(k, m) @ u - e * u)) <= 1e-12
            assert np.linalg.norm(u) == pytest.approx(1.0)

    def test_u_plus_needs_mass(self):
        with pytest.raises(ValueError):
            dr.u_plus(1.0, 0.0)


class TestGaussianPacket:
    def test_unit_norm(self):
        grid = dr.SpectralGrid(256, -12.8, 0.1)
        pk = dr.gaussian_packet(1.0, 0.5, np.array([1.0, 1.0]), grid, 0.1)
        assert np.sum(np.abs(pk.values) ** 2) * grid.dx == pytest.approx(1.0)

    def test_color_direction(self):
        # color (1, 0): the second internal component stays empty
        grid = dr.SpectralGrid(256, -12.8, 0.1)
        pk = dr.gaussian_packet(0.0, 0.5, np.array([2.0, 0.0]), grid, 0.1)
        assert np.max(np.abs(pk.values[:, 1])) == 0.0
        assert np.max(np.abs(pk.values[:, 3])) == 0.0

    def test_group_velocity(self):
        # free evolution moves the packet at k0 / E(k0)
        grid = dr.SpectralGrid(512, -25.6, 0.1)
        k0, m = 1.0, 0.1
        pk = dr.gaussian_packet(k0, 0.5, np.array([1.0]), grid, m)
        t_final = 4.0
        out = dr.solve(pk, free_params(dim=1, mass=m), t_final, 0.002)
        x = grid.positions()
        mean0 = np.sum(x * pk.site_probabilities()) * grid.dx
        mean1 = np.sum(x * out.site_probabilities()) * grid.dx
        vg = k0 / np.sqrt(k0 * k0 + m * m)
        # the packet-averaged velocity differs from vg(k0) by a spread
        # correction of order sigma^2 * vg''
        assert mean1 - mean0 == pytest.approx(vg * t_final, abs=0.06)

    def test_under_resolved_warns(self):
        grid = dr.SpectralGrid(16, -0.8, 0.1)  # length 1.6, sigma*L < 4 pi
        with pytest.warns(UserWarning):
            dr.gaussian_packet(0.0, 1.0, np.array([1.0]), grid, 0.1)

    def test_sigma_validated(self):
        grid = grid64()
        with pytest.raises(ValueError):
            dr.gaussian_packet(0.0, -1.0, np.array([1.0]), grid, 0.1)


class TestSolve:
    def test_zero_time(self):
        grid = grid64()
        f = dr.SpinorField(grid, 1, np.ones((64, 2), dtype=complex))
        out = dr.solve(f, free_params(dim=1), 0.0, 0.01)
        assert np.array_equal(out.values, f.values)

    def test_lands_exactly_on_t_max(self):
        grid = grid64()
        k = grid.wavenumbers()[1]
        m = 0.4
        v = dr.u_plus(k, m)
        vals = np.exp(1j * k * grid.positions())[:, None] * v
        f = dr.SpinorField(grid, 1, vals)
        t_final = 0.25  # not a multiple of dt = 0.1
        out = dr.solve(f, free_params(dim=1, mass=m), t_final, 0.1)
        e = np.sqrt(k * k + m * m)
        # the RK2 error at dt = 0.1 is ~5e-4; landing at the wrong time
        # (0.2 or 0.3) would be off by ~e * 0.05 ~ 5e-2
        assert np.max(np.abs(out.values - vals * np.exp(-1j * e * t_final))) <= 1e-3

    def test_norm_conserved_at_stable_dt(self):
        grid = dr.SpectralGrid(256, -12.8, 0.1)
        pk = dr.gaussian_packet(0.0, 0.5, np.array([1.0]), grid, 0.1)
        out = dr.solve(pk, free_params(dim=1, mass=0.1), 10.0, 0.002)
        drift = abs(np.sum(np.abs(out.values) ** 2) * grid.dx - 1.0)
        assert drift <= 1e-8

    def test_unstable_dt_aborts(self):
        # a near-Nyquist mode under a too-large step grows until it overflows;
        # the march must stop with NumericalAbort instead of returning junk
        grid = grid64()
        k = grid.wavenumbers()[30]
        vals = np.exp(1j * k * grid.positions())[:, None] * np.array([1.0, 0.0])
        f = dr.SpinorField(grid, 1, vals)
        with pytest.raises(dr.NumericalAbort):
            with np.errstate(all="ignore"):
                dr.solve(f, free_params(dim=1, mass=0.1), 200.0, 0.5)

    def test_observer_sees_monotonic_time(self):
        grid = grid64()
        f = dr.SpinorField(grid, 1, np.ones((64, 2), dtype=complex))
        times = []
        dr.solve(f, free_params(dim=1), 0.05, 0.01, observer=lambda t, _: times.append(t))
        assert times == pytest.approx([0.01, 0.02, 0.03, 0.04, 0.05])
