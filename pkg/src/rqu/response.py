"""Frequency-domain engine for the single-tone linearized model:
steady-state cavity amplitude, output transfer functions, detection
quadrature gain and the low-frequency admittance.

All frequencies are offsets in the frame rotating at the drive unless
stated otherwise.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .core import CouplingSpec, DeviceParams, LowFrequencyMode, MicrowaveMode
from .errors import ParameterDomainError, UnsupportedRegimeError

#: circulating photon number below which the linearization is flagged invalid
LINEARIZATION_THRESHOLD = 100.0


@dataclass(frozen=True)
class SingleToneDrive:
    """A single coherent drive tone at omega_d = omega_a + Delta."""

    Delta: float            # detuning from the microwave resonance [rad/s]
    abar_in: complex        # drive amplitude [sqrt(photons/s)]
    omega_d: float = None   # absolute drive frequency [rad/s], informational

    @property
    def photon_flux(self) -> float:
        return abs(self.abar_in) ** 2


@dataclass(frozen=True)
class SteadyState:
    """Classical intracavity amplitude for a single-tone drive."""

    abar: complex           # steady amplitude [sqrt(photons)]
    n_circ: float           # circulating photon number |abar|^2
    Delta: float            # detuning it was computed at [rad/s]
    linearization_valid: bool

    def __post_init__(self):
        if abs(self.n_circ - abs(self.abar) ** 2) > 1e-9 * max(self.n_circ, 1e-300):
            raise ParameterDomainError("n_circ must equal |abar|^2")


@dataclass(frozen=True)
class TransferPoint:
    """Output-field response at one analysis frequency."""

    omega: float                  # offset frequency in the rotating frame [rad/s]
    reflection: complex           # all-pass cavity reflection
    flux_to_output_gain: complex  # output amplitude per unit flux [1/(Wb sqrt(s))]


def steady_state_amplitude(drive: SingleToneDrive, mw: MicrowaveMode,
                           n_circ_threshold: float = LINEARIZATION_THRESHOLD,
                           warn: bool = True) -> SteadyState:
    """Steady intracavity amplitude abar = sqrt(kappa) abar_in / (i Delta - kappa/2).

    n_circ <= n_circ_threshold only flags the linearization (warning, not
    an error): its quality is a judgement the caller may override.
    """
    if mw.kappa <= 0:
        raise ParameterDomainError("kappa must be strictly positive")
    abar = math.sqrt(mw.kappa) * drive.abar_in / (1j * drive.Delta - mw.kappa / 2.0)
    n_circ = abs(abar) ** 2
    valid = n_circ > n_circ_threshold
    if warn and not valid:
        warnings.warn(
            f"n_circ = {n_circ:.3g} <= {n_circ_threshold:g}: linearized model "
            "may be inaccurate", stacklevel=2)
    return SteadyState(abar=abar, n_circ=n_circ, Delta=drive.Delta,
                       linearization_valid=valid)


def output_transfer(omega: float, mw: MicrowaveMode, coupling: CouplingSpec,
                    steady_state: SteadyState) -> TransferPoint:
    """Reflection and flux-to-output gain at offset frequency omega.

    Derived for resonant drive; a steady state at Delta != 0 is rejected.
    """
    if steady_state.Delta != 0.0:
        raise UnsupportedRegimeError(
            "output transfer is derived for resonant drive (Delta = 0); "
            f"got Delta = {steady_state.Delta!r}")
    if not math.isfinite(omega):
        raise ParameterDomainError("omega must be finite")
    half_kappa = mw.kappa / 2.0
    reflection = (1j * omega - half_kappa) / (1j * omega + half_kappa)
    gain = (1j * coupling.g0 * steady_state.abar * math.sqrt(mw.kappa)
            / ((1j * omega + half_kappa) * coupling.Phi_ZPF))
    return TransferPoint(omega=omega, reflection=reflection,
                         flux_to_output_gain=gain)


def phase_quadrature_gain(omega: float, mw: MicrowaveMode,
                          coupling: CouplingSpec, steady_state: SteadyState,
                          bandwidth_factor: float = 10.0) -> complex:
    """Detected phase-quadrature signal per unit flux, in the low-frequency
    limit omega << kappa/2: 4i g0 abar / (sqrt(kappa) Phi_ZPF).

    The limit is enforced as |omega| < (kappa/2)/bandwidth_factor
    (default kappa/20).
    """
    if steady_state.Delta != 0.0:
        raise UnsupportedRegimeError(
            "phase-quadrature detection is derived for resonant drive")
    if abs(omega) >= mw.kappa / (2.0 * bandwidth_factor):
        raise UnsupportedRegimeError(
            f"omega = {omega!r} violates the omega << kappa/2 assumption "
            f"(gate: |omega| < kappa/{2 * bandwidth_factor:g})")
    return 4j * coupling.g0 * steady_state.abar / (
        math.sqrt(mw.kappa) * coupling.Phi_ZPF)


def lf_admittance(omega: float, lf: LowFrequencyMode) -> complex:
    """Rotating-wave admittance of the low-frequency resonator [S].

    Ybar(omega) = -(Y+ + Y-) with
    Y±(omega) = 1 / (2i L_b (i gamma/2 - omega ± omega_b)); the overall
    sign is fixed so that Ybar(omega_b) is real positive (= 1/R_b).
    Valid near resonance, |omega - omega_b| <~ omega_b/10.
    """
    y_plus = 1.0 / (2j * lf.L_b * (1j * lf.gamma / 2.0 - omega + lf.omega_b))
    y_minus = 1.0 / (2j * lf.L_b * (1j * lf.gamma / 2.0 - omega - lf.omega_b))
    return -(y_plus + y_minus)
