"""Device model: physical constants, mode parameters, Josephson inductance
and the flux-to-frequency coupling derived from them.

All types are immutable after construction and every operation is a pure
function, so the whole module is safe for unrestricted concurrent use.
Quantities are SI unless the constants are overridden to hbar = k_B =
Phi0 = 1 for dimensionless simulation units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateDesignError,
    FluxSingularityError,
    ParameterDomainError,
)

_REL_TOL = 1e-12


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterDomainError(message)


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants, overridable to 1 for dimensionless units.

    Defaults are CODATA values: hbar [J s], k_B [J/K] and the flux
    quantum Phi0 = h/(2e) [Wb].
    """

    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23
    Phi0: float = 2.067833848e-15

    def __post_init__(self):
        _require(self.hbar > 0, "hbar must be strictly positive")
        _require(self.k_B > 0, "k_B must be strictly positive")
        _require(self.Phi0 > 0, "Phi0 must be strictly positive")

    @classmethod
    def dimensionless(cls) -> "PhysicalConstants":
        """Simulation units with hbar = k_B = Phi0 = 1."""
        return cls(hbar=1.0, k_B=1.0, Phi0=1.0)


@dataclass(frozen=True)
class LowFrequencyMode:
    """The dc--VHF LC resonator whose flux is the measured signal.

    gamma and R_b may be omitted, in which case they are derived from
    omega_b and Q_b.  If supplied they must satisfy gamma = omega_b/Q_b
    and R_b = omega_b*L_b/Q_b to 1e-12 relative.
    """

    omega_b: float          # resonance [rad/s]
    L_b: float              # inductance [H]
    Q_b: float              # quality factor
    M: float                # effective mutual inductance to the interferometer [H]
    gamma: float = None     # energy decay rate [rad/s]
    R_b: float = None       # on-resonance source resistance [Ohm]
    n_eq: float = 0.0       # thermal occupancy
    bath_T: float = 0.0     # bath temperature [K]

    def __post_init__(self):
        _require(self.omega_b > 0, "omega_b must be strictly positive")
        _require(self.L_b > 0, "L_b must be strictly positive")
        _require(self.M > 0, "M must be strictly positive")
        _require(self.Q_b > 0.5, "Q_b > 1/2 is required")
        _require(self.n_eq >= 0, "n_eq >= 0 is required")
        _require(self.bath_T >= 0, "bath_T >= 0 is required")
        gamma = self.omega_b / self.Q_b
        r_b = self.omega_b * self.L_b / self.Q_b
        if self.gamma is None:
            object.__setattr__(self, "gamma", gamma)
        else:
            _require(
                abs(self.gamma - gamma) <= _REL_TOL * gamma,
                "gamma must equal omega_b/Q_b (1e-12 relative)",
            )
        if self.R_b is None:
            object.__setattr__(self, "R_b", r_b)
        else:
            _require(
                abs(self.R_b - r_b) <= _REL_TOL * r_b,
                "R_b must equal omega_b*L_b/Q_b (1e-12 relative)",
            )


@dataclass(frozen=True)
class MicrowaveMode:
    """Microwave readout resonator: single pole, flux tunable.

    omega_a0 is the resonance at zero flux; L_a is normally solved from
    omega_a0 via :func:`calibrate_microwave_mode` so that the stated
    resonance is exact at the calibration flux.
    """

    omega_a0: float         # resonance at zero flux [rad/s]
    kappa: float            # power decay rate [rad/s]
    L_a: float              # geometric inductance [H]
    C_a: float              # resonator capacitance [F]
    C_c: float              # coupling capacitance [F]
    Lambda: float = 0.0     # Kerr coefficient per photon pair [rad/s]
    chi: float = 1.0        # operating fraction of the bifurcation photon number

    def __post_init__(self):
        _require(self.omega_a0 > 0, "omega_a0 must be strictly positive")
        _require(self.kappa > 0, "kappa must be strictly positive")
        _require(self.L_a > 0, "L_a must be strictly positive")
        _require(self.C_a + self.C_c > 0, "C_a + C_c must be strictly positive")
        _require(self.Lambda >= 0, "Lambda >= 0 is required")
        _require(0 < self.chi <= 1, "chi must lie in (0, 1]")


@dataclass(frozen=True)
class JosephsonElement:
    """Flux-tunable inductance of the Josephson interferometer.

    The default model is a symmetric dc SQUID,
    L_J(Phi) = Phi0 / (4 pi I_c |cos(pi Phi/Phi0)|).
    A user-supplied tabulated L_J(Phi) (cubic interpolation, even in
    flux) is the extension point for multi-junction arrays.
    """

    model: str = "dc-squid"
    I_c: float = None                   # effective critical current [A]
    phi_table: tuple = None             # sample fluxes [Wb], user-table model
    L_table: tuple = None               # sampled inductances [H]
    margin: float = 0.05                # singularity exclusion, fraction of Phi0
    _spline: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.model == "dc-squid":
            _require(self.I_c is not None and self.I_c > 0,
                     "dc-squid model requires I_c > 0")
            _require(0 < self.margin < 0.5,
                     "flux margin must lie in (0, 0.5) of Phi0")
        elif self.model == "user-table":
            _require(self.phi_table is not None and self.L_table is not None,
                     "user-table model requires phi_table and L_table samples")
            phi = np.asarray(self.phi_table, dtype=float)
            L = np.asarray(self.L_table, dtype=float)
            _require(phi.ndim == 1 and phi.size == L.size and phi.size >= 2,
                     "user-table samples must be two equal-length 1-D arrays")
            _require(np.all(L > 0), "user-table inductances must be strictly positive")
            _require(np.all(phi >= 0) and np.all(np.diff(phi) > 0),
                     "user-table fluxes must be non-negative and ascending; "
                     "the curve is even-symmetrized automatically")
            # even-symmetrize about Phi = 0 before building the spline
            if phi[0] == 0.0:
                phi_full = np.concatenate([-phi[:0:-1], phi])
                L_full = np.concatenate([L[:0:-1], L])
            else:
                phi_full = np.concatenate([-phi[::-1], phi])
                L_full = np.concatenate([L[::-1], L])
            object.__setattr__(self, "_spline", CubicSpline(phi_full, L_full))
        else:
            raise ParameterDomainError(f"unknown Josephson model {self.model!r}")

    def zero_flux_inductance(self, constants: PhysicalConstants) -> float:
        """L_J at Phi = 0 (L_J0 = Phi0/(4 pi I_c) for the dc SQUID)."""
        if self.model == "dc-squid":
            return constants.Phi0 / (4.0 * math.pi * self.I_c)
        return float(self._spline(0.0))


@dataclass(frozen=True)
class CouplingSpec:
    """Flux-to-frequency coupling and the zero-point scales it is built from.

    Invariants: Phi_ZPF = sqrt(hbar omega_b L_b / 2), Q_ZPF * Phi_ZPF =
    hbar/2 and g0 = dwa_dPhi * Phi_ZPF, enforced on construction.
    """

    dwa_dPhi: float         # frequency shift per unit flux [rad/(s Wb)]
    g0: float               # single-photon coupling rate [rad/s]
    Phi_ZPF: float          # zero-point flux [Wb]
    Q_ZPF: float            # zero-point charge [C]

    def __post_init__(self):
        _require(self.Phi_ZPF > 0, "Phi_ZPF must be strictly positive")
        _require(self.Q_ZPF > 0, "Q_ZPF must be strictly positive")
        _require(
            abs(self.g0 - self.dwa_dPhi * self.Phi_ZPF)
            <= 1e-12 * max(abs(self.g0), abs(self.dwa_dPhi * self.Phi_ZPF), 1e-300),
            "g0 must equal dwa_dPhi * Phi_ZPF",
        )


@dataclass(frozen=True)
class DeviceParams:
    """All physical parameters of one upconverter design."""

    constants: PhysicalConstants
    lf: LowFrequencyMode
    mw: MicrowaveMode
    jj: JosephsonElement
    coupling: CouplingSpec

    @property
    def sideband_ratio(self) -> float:
        """omega_b / kappa; large values mean resolved sidebands."""
        return self.lf.omega_b / self.mw.kappa


def derive_zero_point(constants: PhysicalConstants, lf: LowFrequencyMode):
    """Zero-point flux and charge of the low-frequency mode.

    Returns (Phi_ZPF, Q_ZPF) with Phi_ZPF = sqrt(hbar omega_b L_b / 2)
    and Q_ZPF = hbar / (2 Phi_ZPF), so Q_ZPF * Phi_ZPF = hbar/2 exactly.
    """
    _require(lf.omega_b > 0 and lf.L_b > 0,
             "omega_b and L_b must be strictly positive")
    phi_zpf = math.sqrt(constants.hbar * lf.omega_b * lf.L_b / 2.0)
    q_zpf = constants.hbar / (2.0 * phi_zpf)
    return phi_zpf, q_zpf


def _squid_cos(jj: JosephsonElement, Phi: float, constants: PhysicalConstants) -> float:
    """cos(pi Phi/Phi0) after the singularity-margin check."""
    x = Phi / constants.Phi0
    dist = abs((x % 1.0) - 0.5)  # distance to the nearest odd multiple of Phi0/2
    if dist < jj.margin:
        raise FluxSingularityError(
            f"flux {Phi!r} lies within {jj.margin:.0%} of an odd multiple of "
            "Phi0/2 where the SQUID inductance diverges"
        )
    return math.cos(math.pi * x)


def josephson_inductance(jj: JosephsonElement, Phi: float,
                         constants: PhysicalConstants) -> float:
    """Interferometer inductance L_J at flux Phi [H].

    Even in Phi with its minimum at Phi = 0 for the dc SQUID.  Raises
    FluxSingularityError inside the margin band around odd multiples of
    Phi0/2.
    """
    if jj.model == "dc-squid":
        c = _squid_cos(jj, Phi, constants)
        return constants.Phi0 / (4.0 * math.pi * jj.I_c * abs(c))
    hi = jj.phi_table[-1]  # table is even-symmetrized over [-hi, hi]
    if not (-hi <= Phi <= hi):
        raise ParameterDomainError(
            f"flux {Phi!r} outside the tabulated range [{-hi!r}, {hi!r}]"
        )
    val = float(jj._spline(Phi))
    if val <= 0:
        raise ParameterDomainError("interpolated inductance is non-positive")
    return val


def josephson_inductance_slope(jj: JosephsonElement, Phi: float,
                               constants: PhysicalConstants) -> float:
    """dL_J/dPhi at flux Phi [H/Wb], analytic for both models."""
    if jj.model == "dc-squid":
        c = _squid_cos(jj, Phi, constants)
        L_J0 = constants.Phi0 / (4.0 * math.pi * jj.I_c)
        s = math.sin(math.pi * Phi / constants.Phi0)
        # d/dPhi of L_J0/|cos| = L_J0 * sign(cos) * sin * (pi/Phi0) / cos^2
        return L_J0 * math.copysign(1.0, c) * s * (math.pi / constants.Phi0) / c ** 2
    josephson_inductance(jj, Phi, constants)  # range check
    return float(jj._spline(Phi, 1))


def microwave_frequency(mw: MicrowaveMode, jj: JosephsonElement, Phi: float,
                        constants: PhysicalConstants) -> float:
    """Flux-dependent microwave resonance
    omega_a = ((L_a + L_J(Phi)) (C_a + C_c))^(-1/2)."""
    L_J = josephson_inductance(jj, Phi, constants)
    L_tot = mw.L_a + L_J
    _require(L_tot > 0, "L_a + L_J(Phi) must be strictly positive")
    return 1.0 / math.sqrt(L_tot * (mw.C_a + mw.C_c))


def calibrate_microwave_mode(omega_a0: float, kappa: float, C_a: float, C_c: float,
                             jj: JosephsonElement, constants: PhysicalConstants,
                             Lambda: float = 0.0, chi: float = 1.0,
                             Phi_cal: float = 0.0) -> MicrowaveMode:
    """Solve L_a from the stated resonance so that
    microwave_frequency(mw, jj, Phi_cal) == omega_a0 exactly.

    The calibration flux defaults to zero, matching the meaning of
    omega_a0 as the zero-flux resonance.
    """
    _require(omega_a0 > 0, "omega_a0 must be strictly positive")
    _require(C_a + C_c > 0, "C_a + C_c must be strictly positive")
    L_J = josephson_inductance(jj, Phi_cal, constants)
    L_a = 1.0 / (omega_a0 ** 2 * (C_a + C_c)) - L_J
    _require(L_a > 0,
             "calibration yields non-positive L_a: omega_a0 too low for the "
             "Josephson inductance at the calibration flux")
    return MicrowaveMode(omega_a0=omega_a0, kappa=kappa, L_a=L_a, C_a=C_a,
                         C_c=C_c, Lambda=Lambda, chi=chi)


def coupling_strength(mw: MicrowaveMode, jj: JosephsonElement,
                      lf: LowFrequencyMode, constants: PhysicalConstants,
                      Phi_bias: float) -> CouplingSpec:
    """Coupling at the flux bias point, via the chain rule
    dwa/dPhi = (dwa/dL_J) (dL_J/dPhi) with dwa/dL_J = -wa / (2 (L_a + L_J)).
    """
    L_J = josephson_inductance(jj, Phi_bias, constants)
    omega_a = microwave_frequency(mw, jj, Phi_bias, constants)
    dLJ_dPhi = josephson_inductance_slope(jj, Phi_bias, constants)
    dwa_dLJ = -omega_a / (2.0 * (mw.L_a + L_J))
    dwa_dPhi = dwa_dLJ * dLJ_dPhi
    phi_zpf, q_zpf = derive_zero_point(constants, lf)
    return CouplingSpec(dwa_dPhi=dwa_dPhi, g0=dwa_dPhi * phi_zpf,
                        Phi_ZPF=phi_zpf, Q_ZPF=q_zpf)


def explicit_coupling(dwa_dPhi: float, lf: LowFrequencyMode,
                      constants: PhysicalConstants) -> CouplingSpec:
    """CouplingSpec from a directly supplied flux-to-frequency slope
    (e.g. a measured value), bypassing the interferometer model."""
    phi_zpf, q_zpf = derive_zero_point(constants, lf)
    return CouplingSpec(dwa_dPhi=dwa_dPhi, g0=dwa_dPhi * phi_zpf,
                        Phi_ZPF=phi_zpf, Q_ZPF=q_zpf)


def thermal_occupancy(omega: float, T: float, constants: PhysicalConstants) -> float:
    """Bose occupancy 1/(exp(hbar omega / k_B T) - 1); zero at T = 0."""
    _require(omega > 0, "omega must be strictly positive")
    _require(T >= 0, "temperature must be non-negative")
    if T == 0.0:
        return 0.0
    x = constants.hbar * omega / (constants.k_B * T)
    return 1.0 / math.expm1(x)


def require_coupled(device: DeviceParams) -> None:
    """Raise DegenerateDesignError when g0 * M vanishes."""
    if device.coupling.g0 * device.lf.M == 0.0:
        raise DegenerateDesignError(
            "degenerate design: g0 * M = 0 decouples the input circuit"
        )


def apply_transformer(device: DeviceParams, N: float) -> DeviceParams:
    """Effective rescaling for an N-turn step-down transformer on the input:
    L_b -> L_b/N^2, M -> M/N (hence R_b -> R_b/N^2), coupling re-derived.

    This is a lumped rescaling only; no transformer electrical model.
    """
    _require(N > 0, "turns ratio must be strictly positive")
    lf = replace(device.lf, L_b=device.lf.L_b / N ** 2, M=device.lf.M / N,
                 gamma=None, R_b=None)
    coupling = explicit_coupling(device.coupling.dwa_dPhi, lf, device.constants)
    return replace(device, lf=lf, coupling=coupling)
