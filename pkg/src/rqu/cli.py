"""Command-line front end: budget, response, bae, simulate, extinction,
oracle and sweep commands with reproducibility manifests.

Exit codes: 0 success; 2 configuration/validation error; 3 unsupported
regime; 4 convergence/resource error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bae as bae_mod
from . import budget as budget_mod
from . import extinction as ext_mod
from . import fock as fock_mod
from . import langevin as sim_mod
from . import response as resp_mod
from .errors import ConfigError, RquError, exit_code_for
from .manifest import (
    RunManifest,
    config_hash,
    format_float,
    write_csv,
    write_json,
)
from .params_io import load_device
from .sweep import SweepSpec, override_device, parse_axis, run_sweep


def _device(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return load_device(args.config)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _budget_point(device, n_circ, omega):
    b = budget_mod.quantum_noise_densities(device, n_circ, omega)
    ybar = resp_mod.lf_admittance(omega, device.lf)
    s_tot = budget_mod.total_added_current_noise(b, ybar, omega)
    t_n = budget_mod.noise_temperature(device, n_circ)
    eps = budget_mod.energy_sensitivity(device, n_circ)
    return {
        "S_II": b.S_II, "S_VV": b.S_VV, "R_noise": b.R_noise,
        "S_II_tot": s_tot, "T_N_K": t_n,
        "epsilon_over_hbar": eps.epsilon_over_hbar,
    }


def cmd_budget(args):
    device = _device(args)
    out = _out_dir(args)
    omega = args.omega if args.omega is not None else device.lf.omega_b
    if args.sweep:
        lo, hi, count = args.sweep.split(":")
        n_grid = np.geomspace(float(lo), float(hi), int(count))
    else:
        n_default = budget_mod.optimal_drive(device)
        n_grid = np.array([args.n_circ if args.n_circ else n_default])
    rows = []
    for n in n_grid:
        point = _budget_point(device, float(n), omega)
        rows.append([n, omega, point["S_II"], point["S_VV"], point["R_noise"],
                     point["S_II_tot"], point["T_N_K"],
                     point["epsilon_over_hbar"]])
    limits = budget_mod.drive_limits(device)
    summary = {
        "n_opt": budget_mod.optimal_drive(device),
        "n_bif": limits.n_bif, "n_max": limits.n_max, "R_max": limits.R_max,
        "Q_min": limits.Q_min, "sql_reachable": limits.sql_reachable,
        "kerr_limited": limits.kerr_limited,
        "psd_convention": "symmetrized, double-sided",
    }
    outputs = []
    if args.format in ("csv", "both"):
        path = out / "budget.csv"
        write_csv(path, ["n_circ", "omega", "S_II", "S_VV", "R_noise",
                         "S_II_tot", "T_N_K", "epsilon_over_hbar"], rows)
        outputs.append(str(path))
    if args.format in ("json", "both"):
        path = out / "budget_summary.json"
        write_json(path, summary)
        outputs.append(str(path))
    return outputs


def cmd_response(args):
    device = _device(args)
    out = _out_dir(args)
    n_circ = args.n_circ if args.n_circ else budget_mod.optimal_drive(device)
    abar_in = math.sqrt(n_circ * device.mw.kappa) / 2.0
    ss = resp_mod.steady_state_amplitude(
        resp_mod.SingleToneDrive(Delta=0.0, abar_in=abar_in), device.mw,
        warn=False)
    if args.omega_grid:
        kind, lo, hi, count = args.omega_grid.split(":")
        if kind == "log":
            grid = np.geomspace(float(lo), float(hi), int(count))
        else:
            grid = np.linspace(float(lo), float(hi), int(count))
    else:
        grid = np.linspace(0.0, device.mw.kappa / 4.0, 101)
    rows = []
    for w in grid:
        tp = resp_mod.output_transfer(float(w), device.mw, device.coupling, ss)
        gain = tp.flux_to_output_gain
        rows.append([w, tp.reflection.real, tp.reflection.imag,
                     abs(gain), float(np.angle(gain))])
    path = out / "response.csv"
    write_csv(path, ["omega_rad_s", "re_reflection", "im_reflection",
                     "gain_abs", "gain_arg"], rows)
    return [str(path)]


def cmd_bae(args):
    device = _device(args)
    out = _out_dir(args)
    n_eq = args.n_eq if args.n_eq is not None else device.lf.n_eq
    drive = bae_mod.TwoToneDrive(a_drive=args.a_drive,
                                 detuning=device.lf.omega_b)
    env = bae_mod.envelope(drive, device.mw, device.lf)
    n_bad = bae_mod.spurious_backaction(env, device.coupling, device.mw,
                                        device.lf, warn=False)
    n_equiv = env.a_max ** 2 / 2.0
    evasion = bae_mod.evasion_factor(device, n_equiv)
    n_ba = (bae_mod.single_tone_backaction_occupancy(device, n_equiv)
            if n_equiv > 0 else 0.0)
    summary = {
        "a_max": env.a_max, "delta": env.delta, "n_bad": n_bad,
        "evasion_dB": evasion, "n_ba_single_tone": n_ba, "n_eq": n_eq,
        "sideband_ratio": device.sideband_ratio,
        "evasion_definition": bae_mod.EVASION_DEFINITION,
    }
    outputs = []
    if args.format in ("json", "both"):
        path = out / "bae.json"
        write_json(path, summary)
        outputs.append(str(path))
    if args.format in ("csv", "both"):
        gamma = device.lf.gamma
        grid = np.linspace(-10.0 * gamma, 10.0 * gamma, 401)
        spec = bae_mod.measured_quadrature_psd(grid, n_eq, n_bad, device.lf)
        path = out / "bae_spectrum.csv"
        write_csv(path, ["omega_rad_s", "S_X"],
                  [[w, s] for w, s in zip(spec.omega_grid, spec.S_X)])
        outputs.append(str(path))
    return outputs


def cmd_simulate(args):
    device = _device(args)
    out = _out_dir(args)
    kappa = device.mw.kappa
    omega_b = device.lf.omega_b
    gamma = device.lf.gamma
    dt = args.dt if args.dt else 1.0 / (20.0 * max(kappa, omega_b))
    duration = args.duration if args.duration else 50.0 / gamma
    config = sim_mod.SimConfig(dt=dt, duration=duration, seed=args.seed,
                               n_trajectories=args.trajectories,
                               welch_segment=args.welch_segment,
                               welch_overlap=0.5)
    outputs = []
    if args.mode == "single":
        n_circ = args.n_circ if args.n_circ else budget_mod.optimal_drive(device)
        channel = args.channel or "out_current"
        spec = sim_mod.single_tone_spectrum(device, n_circ, config,
                                            channel=channel,
                                            workers=args.threads)
        summary = {"mode": "single", "n_circ": n_circ, "channel": channel,
                   "n_averages": spec.n_averages, "ci95": spec.ci95,
                   "dt": dt, "duration": duration,
                   "seed": args.seed, "trajectories": args.trajectories}
        if args.dump_trace:
            drive = resp_mod.SingleToneDrive(
                Delta=0.0, abar_in=math.sqrt(n_circ * kappa) / 2.0)
            trace = sim_mod.simulate_single_tone(device, drive, config)
            outputs.append(_write_trace(out, trace))
    else:
        a_max = args.a_max
        if a_max is None and args.a_drive is not None:
            env = bae_mod.envelope(
                bae_mod.TwoToneDrive(a_drive=args.a_drive, detuning=omega_b),
                device.mw, device.lf)
            a_max = env.a_max
        if a_max is None:
            raise ConfigError("two-tone mode requires --a-max or --a-drive")
        report = sim_mod.measure_two_tone_backaction(device, a_max, config)
        channel = "x_quad"
        env = bae_mod.Envelope(a_max=a_max,
                               delta=math.atan2(kappa, omega_b))
        trace = sim_mod.simulate_two_tone(device, env, config)
        spec = sim_mod.estimate_psd(trace.x_quad, trace.dt, config)
        summary = {"mode": "two-tone", "a_max": a_max, "channel": channel,
                   "n_bad_sim": report.n_bad_sim,
                   "n_bad_closed_form": report.n_bad_closed_form,
                   "x_occupancy_sim": report.x_occupancy_sim,
                   "x_occupancy_expected": report.x_occupancy_expected,
                   "n_averages": spec.n_averages, "dt": trace.dt,
                   "duration": duration, "seed": args.seed,
                   "trajectories": args.trajectories}
        if args.dump_trace:
            outputs.append(_write_trace(out, trace))
    path = out / "spectrum.csv"
    write_csv(path, ["omega_rad_s", "psd"],
              [[w, p] for w, p in zip(spec.freq, spec.psd)])
    outputs.append(str(path))
    path = out / "run.json"
    write_json(path, summary)
    outputs.append(str(path))
    return outputs


def _write_trace(out: Path, trace) -> str:
    limit = 2_000_000
    n = len(trace.t)
    stride = max(1, n // limit)
    rows = []
    for k in range(0, n, stride):
        rows.append([trace.t[k], trace.da[k].real, trace.da[k].imag,
                     trace.b[k].real, trace.b[k].imag, trace.x_quad[k],
                     trace.y_quad[k], trace.out_phase[k]])
    path = out / "trace.csv"
    write_csv(path, ["t", "re_da", "im_da", "re_b", "im_b", "x_quad",
                     "y_quad", "out_phase"], rows)
    return str(path)


def cmd_extinction(args):
    device = _device(args)
    out = _out_dir(args)
    cfg = ext_mod.ExtinctionConfig(amp_imbalance=args.imbalance,
                                   phase_error=args.phase_error,
                                   noise_floor=args.floor)
    phase, power = ext_mod.simulate_extinction_sweep(device, cfg, args.seed)
    floor_known = cfg.leakage_floor() + cfg.noise_floor if args.fixed_floor else None
    fit = ext_mod.fit_extinction(phase, power, floor_known=floor_known)
    model = fit.P0 * np.cos(np.deg2rad(phase) - fit.phi0) ** 2 + fit.floor
    path_csv = out / "extinction.csv"
    write_csv(path_csv, ["phase_deg", "power_rel", "fit_power_rel"],
              [[p, w, m] for p, w, m in zip(phase, power, model)])
    summary = dataclasses.asdict(fit)
    summary["extinction_dB"] = (None if math.isinf(fit.extinction_dB)
                                else fit.extinction_dB)
    summary["extinction_infinite"] = fit.infinite
    summary["raw_extinction_dB"] = ext_mod.raw_extinction_db(power)
    summary["floor_model"] = ext_mod.FLOOR_MODEL_NOTE
    path_json = out / "extinction_fit.json"
    write_json(path_json, summary)
    return [str(path_csv), str(path_json)]


def cmd_oracle(args):
    out = _out_dir(args)
    report = fock_mod.run_case(args.case, N_a=args.na, N_b=args.nb)
    payload = dataclasses.asdict(report)
    path = out / "oracle.json"
    write_json(path, payload)
    return [str(path)]


def cmd_sweep(args):
    device = _device(args)
    out = _out_dir(args)
    spec = SweepSpec(axes=tuple(parse_axis(a) for a in args.axes))

    def evaluate(point, seed):
        dev = override_device(device, point)
        if args.command == "budget":
            n = point.get("n_circ", budget_mod.optimal_drive(dev))
            w = point.get("omega", dev.lf.omega_b)
            res = _budget_point(dev, float(n), float(w))
            limits = budget_mod.drive_limits(dev)
            res.update({"n_opt": budget_mod.optimal_drive(dev),
                        "Q_min": limits.Q_min, "R_max": limits.R_max})
            return res
        if args.command == "bae":
            a_drive = float(point.get("a_drive", args.a_drive))
            drive = bae_mod.TwoToneDrive(a_drive=a_drive,
                                         detuning=dev.lf.omega_b)
            env = bae_mod.envelope(drive, dev.mw, dev.lf)
            n_bad = bae_mod.spurious_backaction(env, dev.coupling, dev.mw,
                                                dev.lf, warn=False)
            return {"a_max": env.a_max, "delta": env.delta, "n_bad": n_bad,
                    "evasion_dB": bae_mod.evasion_factor(
                        dev, env.a_max ** 2 / 2.0)}
        if args.command == "extinction":
            cfg = ext_mod.ExtinctionConfig(
                amp_imbalance=float(point.get("amp_imbalance", args.imbalance)),
                phase_error=args.phase_error, noise_floor=args.floor)
            phase, power = ext_mod.simulate_extinction_sweep(dev, cfg, seed)
            fit = ext_mod.fit_extinction(phase, power)
            return {"extinction_dB": fit.extinction_dB, "P0": fit.P0,
                    "phi0": fit.phi0, "floor": fit.floor}
        raise ConfigError(f"command {args.command!r} is not sweepable")

    rows, columns = run_sweep(spec, evaluate, args.seed,
                              workers=sim_mod.resolve_threads(args.threads))
    path = out / "sweep.csv"
    write_csv(path, columns, rows)
    return [str(path)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rqu",
        description="flux-to-microwave upconverter noise budgets, "
                    "simulation and validation")
    p.add_argument("--config", help="device parameter JSON file")
    p.add_argument("--out-dir", default="rqu-out")
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (overrides RQU_THREADS)")
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument("--debug", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    q = sub.add_parser("budget")
    q.add_argument("--n-circ", type=float, default=None)
    q.add_argument("--omega", type=float, default=None)
    q.add_argument("--sweep", default=None, metavar="MIN:MAX:COUNT",
                   help="log grid over n_circ")
    q.set_defaults(fn=cmd_budget)

    q = sub.add_parser("response")
    q.add_argument("--n-circ", type=float, default=None)
    q.add_argument("--omega-grid", default=None, metavar="KIND:LO:HI:COUNT")
    q.set_defaults(fn=cmd_response)

    q = sub.add_parser("bae")
    q.add_argument("--a-drive", type=float, default=1.0)
    q.add_argument("--n-eq", type=float, default=None)
    q.set_defaults(fn=cmd_bae)

    q = sub.add_parser("simulate")
    q.add_argument("--mode", choices=["single", "two-tone"], default="single")
    q.add_argument("--n-circ", type=float, default=None)
    q.add_argument("--a-max", type=float, default=None)
    q.add_argument("--a-drive", type=float, default=None)
    q.add_argument("--dt", type=float, default=None)
    q.add_argument("--duration", type=float, default=None)
    q.add_argument("--trajectories", type=int, default=2)
    q.add_argument("--welch-segment", type=int, default=4096)
    q.add_argument("--channel", default=None)
    q.add_argument("--dump-trace", action="store_true")
    q.set_defaults(fn=cmd_simulate)

    q = sub.add_parser("extinction")
    q.add_argument("--imbalance", type=float, default=0.0)
    q.add_argument("--phase-error", type=float, default=0.0)
    q.add_argument("--floor", type=float, default=0.0,
                   help="measurement noise floor (relative power)")
    q.add_argument("--fixed-floor", action="store_true",
                   help="fit with the known floor held fixed")
    q.set_defaults(fn=cmd_extinction)

    q = sub.add_parser("oracle")
    q.add_argument("--case", choices=list(fock_mod.CASE_NAMES),
                   default="quad-variances")
    q.add_argument("--na", type=int, default=None)
    q.add_argument("--nb", type=int, default=None)
    q.set_defaults(fn=cmd_oracle)

    q = sub.add_parser("sweep")
    q.add_argument("--command", choices=["budget", "bae", "extinction"],
                   required=True)
    q.add_argument("--axes", action="append", required=True,
                   metavar="NAME=KIND:LO:HI:COUNT")
    q.add_argument("--a-drive", type=float, default=1.0)
    q.add_argument("--imbalance", type=float, default=0.0)
    q.add_argument("--phase-error", type=float, default=0.0)
    q.add_argument("--floor", type=float, default=0.0)
    q.set_defaults(fn=cmd_sweep)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest_payload = {
        "argv": argv if argv is not None else sys.argv[1:],
        "seed": args.seed,
    }
    if args.config:
        try:
            manifest_payload["config"] = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    manifest = RunManifest(
        command_line="rqu " + " ".join(manifest_payload["argv"]),
        config_hash=config_hash(manifest_payload),
        master_seed=args.seed,
        worker_count=sim_mod.resolve_threads(args.threads),
    ).start()
    try:
        outputs = args.fn(args)
    except RquError as exc:
        if args.debug:
            raise
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except Exception as exc:  # pragma: no cover - unexpected
        if args.debug:
            raise
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    manifest.outputs = outputs
    manifest.finish().write(_out_dir(args))
    return 0


if __name__ == "__main__":
    sys.exit(main())
