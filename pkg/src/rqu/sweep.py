"""Deterministic parameter sweeps over whitelisted axes.

Each grid point gets a seed derived from the master seed and the point
index by a splitmix64 mix, so results are reproducible and independent
of the worker count; aggregation is ordered by point index.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import DeviceParams, explicit_coupling
from .errors import ConfigError

AXIS_WHITELIST = ("n_circ", "omega", "a_drive", "kappa", "omega_b", "Q_b",
                  "amp_imbalance")

_DEVICE_AXES = ("kappa", "omega_b", "Q_b")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    kind: str       # "lin" | "log"
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_WHITELIST:
            raise ConfigError(
                f"axis {self.name!r} is not sweepable; whitelist: "
                f"{AXIS_WHITELIST}")
        if self.kind not in ("lin", "log"):
            raise ConfigError("grid kind must be 'lin' or 'log'")
        if self.count < 2:
            raise ConfigError("count >= 2 is required for a sweep axis")
        if self.kind == "log" and (self.lo <= 0 or self.hi <= 0):
            raise ConfigError("log grids require positive bounds")

    def grid(self) -> np.ndarray:
        if self.kind == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axes: tuple

    def __post_init__(self):
        if not (1 <= len(self.axes) <= 3):
            raise ConfigError("a sweep takes between 1 and 3 axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ConfigError("sweep axes must be distinct")

    def points(self):
        grids = [axis.grid() for axis in self.axes]
        names = [axis.name for axis in self.axes]
        for values in itertools.product(*grids):
            yield dict(zip(names, values))


def parse_axis(text: str) -> SweepAxis:
    """Parse 'name=kind:lo:hi:count' (kind optional, default log)."""
    try:
        name, grid = text.split("=", 1)
        parts = grid.split(":")
        if len(parts) == 3:
            kind, (lo, hi, count) = "log", parts
        elif len(parts) == 4:
            kind, lo, hi, count = parts
        else:
            raise ValueError("expected kind:lo:hi:count")
        return SweepAxis(name=name.strip(), kind=kind.strip(),
                         lo=float(lo), hi=float(hi), count=int(count))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse sweep axis {text!r}: {exc}") from exc


def point_seed(master_seed: int, index: int) -> int:
    """splitmix64 of master_seed + index; stable across platforms."""
    z = (int(master_seed) + index * 0x9E3779B97F4A7C15) & (2 ** 64 - 1)
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & (2 ** 64 - 1)
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & (2 ** 64 - 1)
    return (z ^ (z >> 31)) & (2 ** 63 - 1)


def override_device(device: DeviceParams, point: dict) -> DeviceParams:
    """Rebuild the device with swept structural parameters applied.

    omega_b changes re-derive gamma, R_b and the zero-point coupling
    scales; Q_b changes re-derive gamma and R_b; kappa is a direct
    override of the microwave mode.
    """
    dev = device
    if "kappa" in point:
        dev = replace(dev, mw=replace(dev.mw, kappa=float(point["kappa"])))
    if "omega_b" in point or "Q_b" in point:
        lf = replace(
            dev.lf,
            omega_b=float(point.get("omega_b", dev.lf.omega_b)),
            Q_b=float(point.get("Q_b", dev.lf.Q_b)),
            gamma=None,
            R_b=None,
        )
        coupling = explicit_coupling(dev.coupling.dwa_dPhi, lf, dev.constants)
        dev = replace(dev, lf=lf, coupling=coupling)
    return dev


def run_sweep(spec: SweepSpec, evaluate, master_seed: int, workers: int = 1):
    """Evaluate `evaluate(point, seed) -> dict` over the grid.

    Returns (rows, columns): rows ordered by point index; columns are
    the axis names followed by sorted result keys.
    """
    from .langevin import _map_ordered  # shared ordered worker map

    points = list(spec.points())
    tasks = [(i, pt) for i, pt in enumerate(points)]

    def one(task):
        i, pt = task
        return pt, evaluate(pt, point_seed(master_seed, i))

    results = _map_ordered(one, tasks, workers)
    axis_names = [a.name for a in spec.axes]
    result_keys = sorted(results[0][1].keys()) if results else []
    rows = []
    for pt, res in results:
        rows.append([pt[name] for name in axis_names]
                    + [res[k] for k in result_keys])
    return rows, axis_names + result_keys
