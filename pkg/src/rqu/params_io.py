"""Device parameter files: a single JSON document with sections
constants / lf / mw / jj / coupling.  Unknown keys are rejected.

Units per field: frequencies and rates rad/s, inductances H,
capacitances F, currents A, temperatures K, fluxes Wb.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import (
    CouplingSpec,
    DeviceParams,
    JosephsonElement,
    LowFrequencyMode,
    PhysicalConstants,
    calibrate_microwave_mode,
    coupling_strength,
    explicit_coupling,
    thermal_occupancy,
)
from .errors import ConfigError

_SECTIONS = ("constants", "lf", "mw", "jj", "coupling")

_KEYS = {
    "constants": {"hbar", "k_B", "Phi0", "dimensionless"},
    "lf": {"omega_b", "L_b", "Q_b", "M", "gamma", "R_b", "n_eq", "bath_T"},
    "mw": {"omega_a0", "kappa", "C_a", "C_c", "Lambda", "chi", "Phi_cal"},
    "jj": {"model", "I_c", "phi_table", "L_table", "margin"},
    "coupling": {"Phi_bias", "dwa_dPhi"},
}


def _check_keys(section: str, payload: dict) -> None:
    if not isinstance(payload, dict):
        raise ConfigError(f"section {section!r} must be a JSON object")
    unknown = set(payload) - _KEYS[section]
    if unknown:
        raise ConfigError(
            f"unknown keys in section {section!r}: {sorted(unknown)}"
        )


def device_from_dict(doc: dict) -> DeviceParams:
    """Build a DeviceParams from a parsed parameter document."""
    if not isinstance(doc, dict):
        raise ConfigError("parameter document must be a JSON object")
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown top-level sections: {sorted(unknown)}")
    for section in ("lf", "mw", "jj", "coupling"):
        if section not in doc:
            raise ConfigError(f"missing required section {section!r}")

    cdoc = dict(doc.get("constants", {}))
    _check_keys("constants", cdoc)
    if cdoc.pop("dimensionless", False):
        constants = PhysicalConstants.dimensionless()
        if cdoc:
            raise ConfigError(
                "constants.dimensionless excludes explicit constant values"
            )
    else:
        constants = PhysicalConstants(**cdoc)

    lfdoc = dict(doc["lf"])
    _check_keys("lf", lfdoc)
    if "n_eq" not in lfdoc and lfdoc.get("bath_T", 0.0) > 0.0:
        lfdoc["n_eq"] = thermal_occupancy(lfdoc["omega_b"], lfdoc["bath_T"],
                                          constants)
    lf = LowFrequencyMode(**lfdoc)

    jjdoc = dict(doc["jj"])
    _check_keys("jj", jjdoc)
    if "phi_table" in jjdoc:
        jjdoc["phi_table"] = tuple(jjdoc["phi_table"])
    if "L_table" in jjdoc:
        jjdoc["L_table"] = tuple(jjdoc["L_table"])
    jj = JosephsonElement(**jjdoc)

    mwdoc = dict(doc["mw"])
    _check_keys("mw", mwdoc)
    phi_cal = mwdoc.pop("Phi_cal", 0.0)
    mw = calibrate_microwave_mode(jj=jj, constants=constants, Phi_cal=phi_cal,
                                  **mwdoc)

    cpl = dict(doc["coupling"])
    _check_keys("coupling", cpl)
    if "dwa_dPhi" in cpl and "Phi_bias" in cpl:
        raise ConfigError("coupling: give either Phi_bias or dwa_dPhi, not both")
    if "dwa_dPhi" in cpl:
        coupling = explicit_coupling(cpl["dwa_dPhi"], lf, constants)
    elif "Phi_bias" in cpl:
        coupling = coupling_strength(mw, jj, lf, constants, cpl["Phi_bias"])
    else:
        raise ConfigError("coupling: Phi_bias or dwa_dPhi is required")

    return DeviceParams(constants=constants, lf=lf, mw=mw, jj=jj,
                        coupling=coupling)


def load_device(path) -> DeviceParams:
    """Load and validate a device parameter file."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read parameter file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return device_from_dict(doc)


def canonical_json(obj) -> str:
    """Stable serialization used for config hashing; key order independent."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True)
