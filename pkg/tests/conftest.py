import math

import pytest

from rqu.core import (
    DeviceParams,
    JosephsonElement,
    LowFrequencyMode,
    MicrowaveMode,
    PhysicalConstants,
    calibrate_microwave_mode,
    explicit_coupling,
)


def make_dimensionless_device(omega_b=2.0, L_b=4.0, Q_b=32.0, M=1.0,
                              kappa=8.0, g0=1.0, n_eq=0.0, Lambda=0.0,
                              chi=1.0):
    """Device in hbar = k_B = Phi0 = 1 units with an explicitly supplied
    coupling slope chosen to land on the requested g0."""
    constants = PhysicalConstants.dimensionless()
    lf = LowFrequencyMode(omega_b=omega_b, L_b=L_b, Q_b=Q_b, M=M, n_eq=n_eq)
    jj = JosephsonElement(model="user-table", phi_table=(0.0, 0.2, 0.4),
                          L_table=(1e-3, 1e-3, 1e-3))
    omega_a0 = 50.0 * max(kappa, omega_b)
    C = 1e-4 / max(kappa, omega_b) ** 2
    mw = calibrate_microwave_mode(omega_a0=omega_a0, kappa=kappa, C_a=C,
                                  C_c=0.25 * C, jj=jj, constants=constants,
                                  Lambda=Lambda, chi=chi)
    phi_zpf = math.sqrt(constants.hbar * omega_b * L_b / 2.0)
    coupling = explicit_coupling(g0 / phi_zpf, lf, constants)
    return DeviceParams(constants=constants, lf=lf, mw=mw, jj=jj,
                        coupling=coupling)


@pytest.fixture
def unit_device():
    """The worked-example device: Phi_ZPF = 2, Q_ZPF = 1/4, kappa = 8,
    g0 = 1, M = 1, omega_b = 2, R_b = 1/4."""
    return make_dimensionless_device()


@pytest.fixture
def squid_device():
    """SI-unit dc-SQUID device biased at Phi0/4."""
    return make_squid_device()


def make_squid_device(Q_b=2.0e5, Lambda=0.0, kappa=2 * math.pi * 5e6,
                      Phi_bias=None):
    from rqu.core import coupling_strength

    constants = PhysicalConstants()
    lf = LowFrequencyMode(omega_b=6.2e6, L_b=5e-6, Q_b=Q_b, M=1e-10,
                          bath_T=0.025)
    jj = JosephsonElement(model="dc-squid", I_c=5e-6)
    mw = calibrate_microwave_mode(omega_a0=2 * math.pi * 4.89e9, kappa=kappa,
                                  C_a=4.0e-13, C_c=1.0e-13, jj=jj,
                                  constants=constants, Lambda=Lambda, chi=0.9)
    bias = constants.Phi0 / 4.0 if Phi_bias is None else Phi_bias
    coupling = coupling_strength(mw, jj, lf, constants, bias)
    return DeviceParams(constants=constants, lf=lf, mw=mw, jj=jj,
                        coupling=coupling)
