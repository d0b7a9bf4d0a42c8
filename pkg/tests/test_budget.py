import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from rqu.budget import (
    drive_limits,
    energy_sensitivity,
    noise_temperature,
    optimal_drive,
    quantum_noise_densities,
    total_added_current_noise,
)
from rqu.errors import DegenerateDesignError, ParameterDomainError, UsageError
from rqu.response import lf_admittance
from tests.conftest import make_dimensionless_device


class TestQuantumNoiseDensities:
    def test_worked_example(self, unit_device):
        # Phi_ZPF=2, Q_ZPF=1/4, kappa=8, g0=1, M=1, n=1, omega=2
        b = quantum_noise_densities(unit_device, 1.0, 2.0)
        assert b.S_II == pytest.approx(4.0, rel=1e-12)
        assert b.S_VV == pytest.approx(0.25, rel=1e-12)
        assert b.S_IV == 0.0
        assert b.R_noise == pytest.approx(0.25, rel=1e-12)

    def test_uncertainty_product(self, unit_device):
        b = quantum_noise_densities(unit_device, 1.0, 2.0)
        assert math.sqrt(b.S_II * b.S_VV) == pytest.approx(1.0, rel=1e-12)

    def test_drive_scalings(self, unit_device):
        b1 = quantum_noise_densities(unit_device, 1.0, 2.0)
        b2 = quantum_noise_densities(unit_device, 2.0, 2.0)
        assert b2.S_II == pytest.approx(b1.S_II / 2, rel=1e-12)
        assert b2.S_VV == pytest.approx(2 * b1.S_VV, rel=1e-12)
        assert b2.R_noise == pytest.approx(2 * b1.R_noise, rel=1e-12)

    def test_heisenberg_product_sweep(self, unit_device):
        hbar = unit_device.constants.hbar
        for n in np.geomspace(1e-3, 1e3, 13):
            for w in np.geomspace(0.1, 100, 7):
                b = quantum_noise_densities(unit_device, n, w)
                assert math.sqrt(b.S_II * b.S_VV) == pytest.approx(
                    hbar * w / 2, rel=1e-9)

    def test_domain_errors(self, unit_device):
        with pytest.raises(ParameterDomainError):
            quantum_noise_densities(unit_device, 0.0, 1.0)
        with pytest.raises(ParameterDomainError):
            quantum_noise_densities(unit_device, 1.0, -1.0)

    def test_degenerate_design(self):
        dev = make_dimensionless_device(g0=0.0)
        with pytest.raises(DegenerateDesignError):
            quantum_noise_densities(dev, 1.0, 1.0)


class TestTotalAddedNoise:
    def test_open_input(self, unit_device):
        b = quantum_noise_densities(unit_device, 1.0, 2.0)
        assert total_added_current_noise(b, 0.0, 2.0) == b.S_II

    def test_direct_evaluation(self, unit_device):
        b = quantum_noise_densities(unit_device, 1.0, 2.0)
        assert total_added_current_noise(b, 2.0 + 0j, 2.0) == pytest.approx(
            4.0 + 0.25 * 4.0, rel=1e-12)

    def test_omega_mismatch(self, unit_device):
        b = quantum_noise_densities(unit_device, 1.0, 2.0)
        with pytest.raises(UsageError):
            total_added_current_noise(b, 1.0, 2.5)

    def test_minimization_recovers_noise_match(self, unit_device):
        # minimizing over drive at fixed real admittance 1/R_b lands on
        # R_noise = R_b (independent 1-D numeric search)
        r_b = unit_device.lf.R_b
        w = unit_device.lf.omega_b

        def total(log_n):
            b = quantum_noise_densities(unit_device, math.exp(log_n), w)
            return total_added_current_noise(b, 1.0 / r_b, w)

        res = minimize_scalar(total, bounds=(-10, 10), method="bounded",
                              options={"xatol": 1e-12})
        n_star = math.exp(res.x)
        b = quantum_noise_densities(unit_device, n_star, w)
        assert b.R_noise == pytest.approx(r_b, rel=1e-4)


class TestNoiseTemperature:
    def test_worked_example(self, unit_device):
        # R_b = R_noise(n=1) = 1/4 -> T_N = hbar*omega_b/2 = 1
        assert noise_temperature(unit_device, 1.0) == pytest.approx(1.0,
                                                                    rel=1e-12)

    def test_mismatch_penalty(self, unit_device):
        # R_b = 4 R_noise -> (r + 1/r)/2 with r = 4 -> 2.125x SQL
        t = noise_temperature(unit_device, 0.25)
        sql = unit_device.constants.hbar * unit_device.lf.omega_b / (
            2 * unit_device.constants.k_B)
        assert t / sql == pytest.approx(2.125, rel=1e-12)

    def test_convex_with_unique_minimum(self, unit_device):
        grid = np.geomspace(0.01, 100, 41)
        t = np.array([noise_temperature(unit_device, n) for n in grid])
        k = int(np.argmin(t))
        assert 0 < k < len(grid) - 1
        assert np.all(np.diff(t[:k + 1]) < 0)
        assert np.all(np.diff(t[k:]) > 0)


class TestOptimalDrive:
    def test_worked_example(self, unit_device):
        assert optimal_drive(unit_device) == pytest.approx(1.0, rel=1e-12)

    def test_linear_in_rb(self, unit_device):
        dev4 = make_dimensionless_device(Q_b=8.0)  # R_b -> 1
        assert optimal_drive(dev4) == pytest.approx(4 * optimal_drive(unit_device),
                                                    rel=1e-12)

    def test_sql_floor_random_devices(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            dev = make_dimensionless_device(
                omega_b=10 ** rng.uniform(-1, 1),
                L_b=10 ** rng.uniform(-1, 1),
                Q_b=10 ** rng.uniform(1.2, 4),
                M=10 ** rng.uniform(-1, 0),
                kappa=10 ** rng.uniform(0.5, 2),
                g0=10 ** rng.uniform(-2, 0))
            n_opt = optimal_drive(dev)
            t_n = noise_temperature(dev, n_opt)
            sql = dev.constants.hbar * dev.lf.omega_b / (2 * dev.constants.k_B)
            assert t_n == pytest.approx(sql, rel=1e-9)


class TestDriveLimits:
    def test_constructed_identity(self):
        dev = make_dimensionless_device(kappa=2 * math.sqrt(3.0), Lambda=1.0,
                                        chi=1.0)
        lim = drive_limits(dev)
        assert lim.n_bif == pytest.approx(1.0, rel=1e-12)
        assert lim.n_max == pytest.approx(1.0, rel=1e-12)
        assert lim.kerr_limited

    def test_lambda_zero_flagged_infinite(self, unit_device):
        lim = drive_limits(unit_device)
        assert not lim.kerr_limited
        assert math.isinf(lim.n_bif) and math.isinf(lim.R_max)
        assert lim.Q_min == 0.0
        assert lim.sql_reachable

    def test_chi_scalings(self):
        full = make_dimensionless_device(Lambda=0.01, chi=1.0)
        half = make_dimensionless_device(Lambda=0.01, chi=0.5)
        l_full, l_half = drive_limits(full), drive_limits(half)
        assert l_half.n_max == pytest.approx(l_full.n_max / 2, rel=1e-12)
        assert l_half.R_max == pytest.approx(l_full.R_max / 2, rel=1e-12)
        assert l_half.Q_min == pytest.approx(2 * l_full.Q_min, rel=1e-12)

    def test_consistency_with_budget(self):
        dev = make_dimensionless_device(Lambda=0.02, chi=0.8)
        lim = drive_limits(dev)
        b = quantum_noise_densities(dev, lim.n_max, dev.lf.omega_b)
        assert lim.R_max == pytest.approx(b.R_noise, rel=1e-12)
        assert lim.Q_min == pytest.approx(
            dev.lf.omega_b * dev.lf.L_b / lim.R_max, rel=1e-12)


class TestEnergySensitivity:
    def test_direct_evaluation(self):
        # S_II = 4 requires g0 = 1/2 at L_b = 1, omega_b = 2, kappa = 8
        dev = make_dimensionless_device(L_b=1.0, g0=0.5)
        rep = energy_sensitivity(dev, 1.0)
        assert rep.epsilon == pytest.approx(2.0, rel=1e-12)
        assert rep.epsilon_over_hbar == pytest.approx(2.0, rel=1e-12)

    def test_threshold_identity(self, unit_device):
        rep = energy_sensitivity(unit_device, 1.0)
        at_threshold = energy_sensitivity(unit_device, rep.n_threshold)
        assert at_threshold.epsilon_over_hbar == pytest.approx(1.0, rel=1e-12)

    def test_threshold_closed_form(self, unit_device):
        rep = energy_sensitivity(unit_device, 1.0)
        lf = unit_device.lf
        c = unit_device.coupling
        kappa = unit_device.mw.kappa
        expected = lf.omega_b * kappa * lf.L_b ** 2 / (32 * (c.g0 * lf.M) ** 2)
        assert rep.n_threshold == pytest.approx(expected, rel=1e-12)

    def test_inverse_drive_scaling(self, unit_device):
        eps = [energy_sensitivity(unit_device, n).epsilon
               for n in np.geomspace(1.0, 1000.0, 7)]
        for k, n in enumerate(np.geomspace(1.0, 1000.0, 7)):
            assert eps[k] == pytest.approx(eps[0] / n, rel=1e-12)

    def test_sub_hbar_iff_above_threshold(self, unit_device):
        rep = energy_sensitivity(unit_device, 1.0)
        above = energy_sensitivity(unit_device, rep.n_threshold * 1.01)
        below = energy_sensitivity(unit_device, rep.n_threshold * 0.99)
        assert above.epsilon_over_hbar < 1.0 < below.epsilon_over_hbar

    def test_epsilon_identity(self, unit_device):
        for n in (0.3, 3.0, 30.0):
            rep = energy_sensitivity(unit_device, n)
            b = quantum_noise_densities(unit_device, n, unit_device.lf.omega_b)
            assert rep.epsilon * 2 / unit_device.lf.L_b == pytest.approx(
                b.S_II, rel=1e-12)


def test_admittance_budget_coupling(unit_device):
    # S_II_tot at resonance doubles the imprecision at the optimal drive
    n_opt = optimal_drive(unit_device)
    b = quantum_noise_densities(unit_device, n_opt, unit_device.lf.omega_b)
    y = lf_admittance(unit_device.lf.omega_b, unit_device.lf)
    tot = total_added_current_noise(b, y, unit_device.lf.omega_b)
    assert tot == pytest.approx(2 * b.S_II, rel=2e-2)
