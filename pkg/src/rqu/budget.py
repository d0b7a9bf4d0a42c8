"""Single-tone op-amp-mode quantum noise budget.

Spectral densities are symmetrized and double-sided; S_II is referred to
the input current through L_b, S_VV to the backaction voltage in the
input loop.  The model has no imprecision-backaction correlation
(S_IV = 0), so sqrt(S_II S_VV) = hbar omega / 2 at every drive level:
the budget sits on the phase-preserving amplifier bound, and the drive
power only moves noise between the two quadrants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DeviceParams, require_coupled
from .errors import ParameterDomainError, UsageError
from .response import lf_admittance

_OMEGA_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class NoiseBudget:
    """Imprecision/backaction densities at one (drive, frequency) point."""

    S_II: float          # imprecision current density [A^2/Hz]
    S_VV: float          # backaction voltage density [V^2/Hz]
    S_IV: float          # cross density, identically 0 in this model
    R_noise: float       # sqrt(S_VV/S_II) [Ohm]
    omega_eval: float    # analysis frequency [rad/s]


@dataclass(frozen=True)
class DriveLimits:
    """Drive-power ceiling from the Kerr bifurcation and its consequences."""

    n_bif: float         # bifurcation photon number kappa/(2 sqrt(3) Lambda)
    n_max: float         # operating ceiling chi * n_bif
    R_max: float         # highest reachable noise resistance [Ohm]
    Q_min: float         # minimum input quality factor for SQL readout
    kerr_limited: bool   # False when Lambda = 0 (all limits infinite)
    sql_reachable: bool  # R_max > R_b


@dataclass(frozen=True)
class SensitivityReport:
    """Energy sensitivity and noise temperature at one drive level."""

    epsilon: float            # S_II * L_b / 2 [J s]
    epsilon_over_hbar: float
    n_threshold: float        # drive photon number where epsilon = hbar
    T_N: float                # on-resonance noise temperature [K]
    n_opt: float              # drive photon number where R_noise = R_b


def quantum_noise_densities(device: DeviceParams, n_circ: float,
                            omega: float) -> NoiseBudget:
    """Symmetrized imprecision and backaction densities at drive n_circ.

    S_II = Phi_ZPF^2 kappa / (8 n g0^2 M^2),
    S_VV = 8 n g0^2 M^2 omega^2 Q_ZPF^2 / kappa,  S_IV = 0.
    """
    if n_circ <= 0:
        raise ParameterDomainError("n_circ must be strictly positive")
    if omega <= 0:
        raise ParameterDomainError("omega must be strictly positive")
    require_coupled(device)
    g0 = device.coupling.g0
    M = device.lf.M
    kappa = device.mw.kappa
    phi_zpf = device.coupling.Phi_ZPF
    q_zpf = device.coupling.Q_ZPF
    gm2 = (g0 * M) ** 2
    s_ii = phi_zpf ** 2 * kappa / (8.0 * n_circ * gm2)
    s_vv = 8.0 * n_circ * gm2 * omega ** 2 * q_zpf ** 2 / kappa
    r_noise = math.sqrt(s_vv / s_ii)
    budget = NoiseBudget(S_II=s_ii, S_VV=s_vv, S_IV=0.0, R_noise=r_noise,
                         omega_eval=omega)
    # the uncertainty product is structural; guard against silent breakage
    hbar = device.constants.hbar
    prod = math.sqrt(s_ii * s_vv)
    assert abs(prod - hbar * omega / 2.0) <= 1e-9 * hbar * omega / 2.0
    return budget


def total_added_current_noise(budget: NoiseBudget, admittance: complex,
                              admittance_omega: float) -> float:
    """Total input-referred current noise
    S_II,tot = S_II + S_VV |Ybar|^2 + 2 Re(S_IV Ybar*).

    admittance_omega must match the frequency the budget was evaluated at.
    """
    if abs(admittance_omega - budget.omega_eval) > _OMEGA_MATCH_RTOL * abs(
            budget.omega_eval):
        raise UsageError(
            f"admittance evaluated at {admittance_omega!r} but budget at "
            f"{budget.omega_eval!r}")
    return (budget.S_II + budget.S_VV * abs(admittance) ** 2
            + 2.0 * (budget.S_IV * admittance.conjugate()).real)


def noise_temperature(device: DeviceParams, n_circ: float) -> float:
    """On-resonance noise temperature [K]:
    2 k_B T_N = S_VV/R_b + R_b S_II, evaluated at omega = omega_b."""
    budget = quantum_noise_densities(device, n_circ, device.lf.omega_b)
    r_b = device.lf.R_b
    return (budget.S_VV / r_b + r_b * budget.S_II) / (2.0 * device.constants.k_B)


def optimal_drive(device: DeviceParams) -> float:
    """Drive photon number at which R_noise = R_b, minimizing T_N.

    n_opt = R_b kappa Phi_ZPF / (8 g0^2 omega_b M^2 Q_ZPF); plugging it
    back into noise_temperature gives the SQL, k_B T_N = hbar omega_b/2.
    """
    require_coupled(device)
    c = device.coupling
    return (device.lf.R_b * device.mw.kappa * c.Phi_ZPF
            / (8.0 * c.g0 ** 2 * device.lf.omega_b * device.lf.M ** 2 * c.Q_ZPF))


def drive_limits(device: DeviceParams) -> DriveLimits:
    """Kerr bifurcation ceiling and the resulting R_max and Q_min.

    n_bif = kappa / (2 sqrt(3) Lambda); with Lambda = 0 all limits are
    infinite and kerr_limited is False.
    """
    require_coupled(device)
    mw = device.mw
    lf = device.lf
    c = device.coupling
    if mw.Lambda == 0.0:
        return DriveLimits(n_bif=math.inf, n_max=math.inf, R_max=math.inf,
                           Q_min=0.0, kerr_limited=False, sql_reachable=True)
    n_bif = mw.kappa / (2.0 * math.sqrt(3.0) * mw.Lambda)
    n_max = mw.chi * n_bif
    r_max = (8.0 * n_max * c.g0 ** 2 * lf.omega_b * lf.M ** 2 * c.Q_ZPF
             / (mw.kappa * c.Phi_ZPF))
    q_min = lf.omega_b * lf.L_b / r_max
    return DriveLimits(n_bif=n_bif, n_max=n_max, R_max=r_max, Q_min=q_min,
                       kerr_limited=True, sql_reachable=r_max > lf.R_b)


def energy_sensitivity(device: DeviceParams, n_circ: float) -> SensitivityReport:
    """Uncoupled energy sensitivity for an untuned inductive input.

    epsilon = S_II L_b / 2; backaction is insignificant for an untuned
    (high-impedance) input, so only the imprecision quadrature enters.
    The sub-hbar drive threshold solves epsilon(n) = hbar exactly:
    n_threshold = Phi_ZPF^2 kappa L_b / (16 hbar g0^2 M^2)
                = omega_b kappa L_b^2 / (32 g0^2 M^2).
    """
    budget = quantum_noise_densities(device, n_circ, device.lf.omega_b)
    hbar = device.constants.hbar
    c = device.coupling
    eps = budget.S_II * device.lf.L_b / 2.0
    n_threshold = (c.Phi_ZPF ** 2 * device.mw.kappa * device.lf.L_b
                   / (16.0 * hbar * (c.g0 * device.lf.M) ** 2))
    return SensitivityReport(
        epsilon=eps,
        epsilon_over_hbar=eps / hbar,
        n_threshold=n_threshold,
        T_N=noise_temperature(device, n_circ),
        n_opt=optimal_drive(device),
    )


def total_noise_on_resonance(device: DeviceParams, n_circ: float) -> float:
    """S_II,tot at omega_b with the rotating-wave admittance [A^2/Hz]."""
    budget = quantum_noise_densities(device, n_circ, device.lf.omega_b)
    ybar = lf_admittance(device.lf.omega_b, device.lf)
    return total_added_current_noise(budget, ybar, device.lf.omega_b)
