import json
import math

import pytest

from rqu.errors import ConfigError, ParameterDomainError
from rqu.params_io import device_from_dict, load_device


def base_doc():
    return {
        "constants": {},
        "lf": {"omega_b": 6.2e6, "L_b": 5e-6, "Q_b": 2e5, "M": 1e-10,
               "bath_T": 0.025},
        "mw": {"omega_a0": 2 * math.pi * 4.89e9, "kappa": 1e7,
               "C_a": 4e-13, "C_c": 1e-13, "Lambda": 3000.0, "chi": 0.9},
        "jj": {"model": "dc-squid", "I_c": 5e-6},
        "coupling": {"Phi_bias": 5.17e-16},
    }


def test_round_trip_build():
    dev = device_from_dict(base_doc())
    assert dev.lf.gamma == pytest.approx(6.2e6 / 2e5)
    assert dev.coupling.g0 != 0.0
    assert dev.mw.L_a > 0
    # n_eq derived from bath_T
    x = dev.constants.hbar * 6.2e6 / (dev.constants.k_B * 0.025)
    assert dev.lf.n_eq == pytest.approx(1 / (math.exp(x) - 1), rel=1e-12)


def test_unknown_top_level_key():
    doc = base_doc()
    doc["extra"] = {}
    with pytest.raises(ConfigError, match="extra"):
        device_from_dict(doc)


def test_unknown_section_key():
    doc = base_doc()
    doc["lf"]["bogus"] = 1.0
    with pytest.raises(ConfigError, match="bogus"):
        device_from_dict(doc)


def test_missing_section():
    doc = base_doc()
    del doc["jj"]
    with pytest.raises(ConfigError, match="jj"):
        device_from_dict(doc)


def test_explicit_slope_conflicts_with_bias():
    doc = base_doc()
    doc["coupling"] = {"Phi_bias": 1e-16, "dwa_dPhi": 1e20}
    with pytest.raises(ConfigError, match="either"):
        device_from_dict(doc)


def test_dimensionless_units():
    doc = {
        "constants": {"dimensionless": True},
        "lf": {"omega_b": 2.0, "L_b": 4.0, "Q_b": 32.0, "M": 1.0},
        "mw": {"omega_a0": 100.0, "kappa": 8.0, "C_a": 1e-4, "C_c": 0.0},
        "jj": {"model": "user-table", "phi_table": [0.0, 0.5],
               "L_table": [1e-3, 1e-3]},
        "coupling": {"dwa_dPhi": 0.5},
    }
    dev = device_from_dict(doc)
    assert dev.constants.hbar == 1.0
    assert dev.coupling.g0 == pytest.approx(1.0, rel=1e-12)
    assert dev.coupling.Phi_ZPF == pytest.approx(2.0, rel=1e-12)


def test_invariant_violation_names_field():
    doc = base_doc()
    doc["lf"]["Q_b"] = 0.1
    with pytest.raises(ParameterDomainError, match=r"Q_b > 1/2"):
        device_from_dict(doc)


def test_load_device_file(tmp_path):
    path = tmp_path / "dev.json"
    path.write_text(json.dumps(base_doc()))
    dev = load_device(path)
    assert dev.jj.I_c == 5e-6
    with pytest.raises(ConfigError):
        load_device(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="JSON"):
        load_device(bad)
