"""Quantum model of a flux-to-microwave upconverter: noise budgets
against the SQL, stochastic Langevin simulation, two-tone backaction
evasion analysis and a truncated-Fock exact oracle."""

__version__ = "0.1.0"

from .core import (
    CouplingSpec,
    DeviceParams,
    JosephsonElement,
    LowFrequencyMode,
    MicrowaveMode,
    PhysicalConstants,
    calibrate_microwave_mode,
    coupling_strength,
    derive_zero_point,
    explicit_coupling,
    josephson_inductance,
    microwave_frequency,
    thermal_occupancy,
)
from .params_io import device_from_dict, load_device
from .response import (
    SingleToneDrive,
    SteadyState,
    TransferPoint,
    lf_admittance,
    output_transfer,
    phase_quadrature_gain,
    steady_state_amplitude,
)
from .budget import (
    DriveLimits,
    NoiseBudget,
    SensitivityReport,
    drive_limits,
    energy_sensitivity,
    noise_temperature,
    optimal_drive,
    quantum_noise_densities,
    total_added_current_noise,
)
from .bae import (
    Envelope,
    QuadratureSpectrum,
    TwoToneDrive,
    envelope,
    evasion_factor,
    measured_quadrature_psd,
    spurious_backaction,
)
from .langevin import (
    SimConfig,
    SpectrumEstimate,
    Trace,
    estimate_psd,
    measure_two_tone_backaction,
    simulate_single_tone,
    simulate_two_tone,
    single_tone_spectrum,
    sql_experiment,
)
from .extinction import (
    ExtinctionConfig,
    ExtinctionFit,
    fit_extinction,
    simulate_extinction_sweep,
)
from .fock import FockConfig, OracleReport, build_generator, run_case, steady_state
