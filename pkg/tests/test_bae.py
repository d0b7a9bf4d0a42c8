import math

import numpy as np
import pytest
from scipy.integrate import quad

from rqu.bae import (
    Envelope,
    TwoToneDrive,
    envelope,
    evasion_factor,
    measured_quadrature_psd,
    single_tone_backaction_occupancy,
    spurious_backaction,
)
from rqu.core import LowFrequencyMode
from tests.conftest import make_dimensionless_device


def device_with(kappa, omega_b, Q_b=100.0, g0=1.0, L_b=None, M=None):
    L = 1.0 if L_b is None else L_b
    return make_dimensionless_device(omega_b=omega_b, L_b=L, Q_b=Q_b,
                                     M=(L if M is None else M), kappa=kappa,
                                     g0=g0)


class TestEnvelope:
    def test_direct_evaluation(self):
        dev = device_with(kappa=4.0, omega_b=3.0)
        env = envelope(TwoToneDrive(a_drive=1.0, detuning=3.0), dev.mw, dev.lf)
        assert env.a_max == pytest.approx(0.27735009811261456, rel=1e-12)
        assert env.delta == pytest.approx(0.9272952180016122, rel=1e-12)

    def test_resolved_sideband_asymptote(self):
        dev = device_with(kappa=0.01, omega_b=100.0)
        env = envelope(TwoToneDrive(a_drive=1.0, detuning=100.0), dev.mw,
                       dev.lf)
        assert env.a_max == pytest.approx(
            math.sqrt(dev.mw.kappa) / (2 * dev.lf.omega_b), rel=1e-4)
        assert env.delta == pytest.approx(0.0, abs=1e-3)

    def test_matched_rates_phase(self):
        dev = device_with(kappa=5.0, omega_b=5.0)
        env = envelope(TwoToneDrive(a_drive=2.0, detuning=5.0), dev.mw, dev.lf)
        assert env.delta == pytest.approx(math.pi / 4, rel=1e-12)

    def test_amplitude_identity(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            kappa = 10 ** rng.uniform(-1, 1)
            omega_b = 10 ** rng.uniform(-1, 1)
            a_drive = 10 ** rng.uniform(-1, 1)
            dev = device_with(kappa=kappa, omega_b=omega_b)
            env = envelope(TwoToneDrive(a_drive=a_drive, detuning=omega_b),
                           dev.mw, dev.lf)
            lhs = env.a_max ** 2 * (kappa ** 2 + 4 * omega_b ** 2)
            assert lhs == pytest.approx(a_drive ** 2 * kappa, rel=1e-12)
            assert 0.0 < env.delta < math.pi / 2
            assert env.a_max < a_drive / math.sqrt(kappa)


class TestSpuriousBackaction:
    def test_direct_evaluation(self):
        # a_max g0 = 4, kappa = 2, gamma = 1, omega_b = 20 -> 0.005
        dev = device_with(kappa=2.0, omega_b=20.0, Q_b=20.0, g0=1.0)
        assert dev.lf.gamma == pytest.approx(1.0)
        env = Envelope(a_max=4.0, delta=0.1)
        n_bad = spurious_backaction(env, dev.coupling, dev.mw, dev.lf)
        assert n_bad == pytest.approx(0.005, rel=1e-12)

    def test_kappa_scaling(self):
        # net n_bad ~ kappa at fixed a_max, gamma, omega_b
        env = Envelope(a_max=4.0, delta=0.0)
        dev1 = device_with(kappa=2.0, omega_b=20.0, Q_b=20.0)
        dev2 = device_with(kappa=0.2, omega_b=20.0, Q_b=20.0)
        n1 = spurious_backaction(env, dev1.coupling, dev1.mw, dev1.lf)
        n2 = spurious_backaction(env, dev2.coupling, dev2.mw, dev2.lf,
                                 warn=False)
        assert n2 == pytest.approx(n1 / 10, rel=1e-12)

    def test_no_drive_no_backaction(self):
        dev = device_with(kappa=2.0, omega_b=20.0)
        n_bad = spurious_backaction(Envelope(a_max=0.0, delta=0.0),
                                    dev.coupling, dev.mw, dev.lf)
        assert n_bad == 0.0

    def test_poor_resolution_warns(self):
        dev = device_with(kappa=10.0, omega_b=5.0)
        with pytest.warns(UserWarning, match="sideband"):
            spurious_backaction(Envelope(a_max=1.0, delta=0.0), dev.coupling,
                                dev.mw, dev.lf)

    def test_scaling_invariant(self):
        # n_bad * (omega_b/kappa)^2 independent of omega_b at fixed rest
        env = Envelope(a_max=2.0, delta=0.0)
        vals = []
        for omega_b in (10.0, 30.0, 90.0):
            dev = device_with(kappa=1.0, omega_b=omega_b, Q_b=omega_b)
            n_bad = spurious_backaction(env, dev.coupling, dev.mw, dev.lf)
            vals.append(n_bad * (omega_b / dev.mw.kappa) ** 2)
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        assert vals[0] == pytest.approx(vals[2], rel=1e-12)


class TestQuadratureSpectrum:
    def lf(self, gamma=2.0):
        return LowFrequencyMode(omega_b=100.0, L_b=1.0, Q_b=100.0 / gamma,
                                M=1.0)

    def test_vacuum_peak(self):
        spec = measured_quadrature_psd([0.0], 0.0, 0.0, self.lf(2.0))
        assert spec.S_X[0] == pytest.approx(1.0, rel=1e-12)

    def test_half_width_point(self):
        spec = measured_quadrature_psd([1.0], 0.0, 0.0, self.lf(2.0))
        assert spec.S_X[0] == pytest.approx(0.5, rel=1e-12)

    def test_occupancy_peak(self):
        spec = measured_quadrature_psd([0.0], 3.0, 0.5, self.lf(2.0))
        assert spec.S_X[0] == pytest.approx(8.0, rel=1e-12)

    def test_even_and_normalized(self):
        lf = self.lf(2.0)
        grid = np.linspace(-5, 5, 41)
        spec = measured_quadrature_psd(grid, 0.7, 0.1, lf)
        assert np.allclose(spec.S_X, spec.S_X[::-1])
        # integral over [-50 gamma, 50 gamma] is pi (1 + 2(n_eq + n_bad));
        # the truncated Lorentzian tails hold back exactly 2/(100 pi) = 0.64%
        val, _ = quad(
            lambda w: measured_quadrature_psd([w], 0.7, 0.1, lf).S_X[0],
            -50 * lf.gamma, 50 * lf.gamma, limit=400)
        expected = math.pi * (1 + 2 * 0.8)
        assert val == pytest.approx(expected * 2 * math.atan(100) / math.pi,
                                    rel=1e-6)
        assert val == pytest.approx(expected, rel=8e-3)


class TestEvasionFactor:
    def test_equal_occupancies_zero_db(self):
        # engineered so n_bad equals the single-tone backaction occupancy:
        # analytic ratio is (4 omega_b M / (L_b kappa))^2 = 1
        dev = device_with(kappa=4.0, omega_b=1.0, Q_b=100.0)
        n_equiv = 0.5
        a_max = math.sqrt(2 * n_equiv)
        n_bad = spurious_backaction(Envelope(a_max=a_max, delta=0.0),
                                    dev.coupling, dev.mw, dev.lf, warn=False)
        n_ba = single_tone_backaction_occupancy(dev, n_equiv)
        assert n_ba == pytest.approx(n_bad, rel=2e-2)
        assert evasion_factor(dev, n_equiv) == pytest.approx(0.0, abs=0.1)

    def test_resolved_sideband_gain(self):
        dev = device_with(kappa=1.0, omega_b=10.0, Q_b=1000.0)
        # closed form: 20 log10(4 omega_b M / (kappa L_b))
        assert evasion_factor(dev, 2.0) == pytest.approx(
            20 * math.log10(40.0), abs=0.1)

    def test_kappa_scaling(self):
        # kappa -> kappa/10 at fixed envelope: n_bad falls 10x and the
        # single-tone budget backaction rises 10x, so the factor gains 20 dB
        dev1 = device_with(kappa=1.0, omega_b=10.0, Q_b=1000.0)
        dev2 = device_with(kappa=0.1, omega_b=10.0, Q_b=1000.0)
        f1 = evasion_factor(dev1, 3.0)
        f2 = evasion_factor(dev2, 3.0)
        assert f2 - f1 == pytest.approx(20.0, abs=0.2)

    def test_zero_drive_sentinel(self):
        dev = device_with(kappa=1.0, omega_b=10.0)
        assert math.isinf(evasion_factor(dev, 0.0))

    def test_demonstration_regime_below_10db(self):
        # kappa/2pi = 5 MHz about a 2.9 MHz modulation: poor sideband
        # resolution bounds the evasion below 10 dB
        from tests.conftest import make_squid_device

        dev = make_squid_device()
        dev = _with_full_coupling(dev)
        assert dev.lf.omega_b / dev.mw.kappa < 1.0
        factor = evasion_factor(dev, 100.0)
        assert factor < 10.0


def _with_full_coupling(dev):
    """Set M = L_b so the op-amp referral matches the direct coupling."""
    from dataclasses import replace

    lf = replace(dev.lf, M=dev.lf.L_b, gamma=None, R_b=None)
    return replace(dev, lf=lf)
