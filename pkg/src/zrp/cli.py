"""Command line front end: ``zrp dcs|ics|vib|validate``.

Exit codes: 0 ok, 1 validation-suite failure, 2 config error, 3 closed
channel / kinematics error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .channels import ClosedChannelError, kinematics
from .config import BOHR2_CM2_E16, HARTREE_EV, PRESETS, UNITS, ConfigError, RunConfig
from .molecule import energy_level, reference_grid, v_max, vib_harmonic
from .validation import run_checks
from .xsection import CrossSectionCurve, dcs_pure, dcs_vib, ics_pure, ics_vib, vib_kinematics

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_KINEMATICS = 0, 1, 2, 3


class KinematicsError(RuntimeError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def angle_grid(step_deg: float) -> np.ndarray:
    n = int(math.floor(180.0 / step_deg + 1e-9))
    return np.round(np.arange(n + 1) * step_deg, 10)


def energy_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        raise ConfigError(f"energy grid upper bound {hi} below lower bound {lo}")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return np.round(lo + np.arange(n + 1) * step, 10)


def write_csv(curve: CrossSectionCurve, cfg: RunConfig, units: str, stream, extra_columns=None) -> None:
    scale = BOHR2_CM2_E16 if units == "cm2e-16" else 1.0
    area = "1e-16 cm^2" if units == "cm2e-16" else "bohr^2"
    is_dcs = curve.kind.startswith("dcs")
    stream.write("# zrp-multichannel\n")
    stream.write(f"# config-sha256: {cfg.digest()}\n")
    per = "/sr" if is_dcs else ""
    stream.write(f"# units: {'angle deg' if is_dcs else 'energy eV'}, cross section {area}{per}, atomic units inside\n")
    stream.write(f"# scattering_length_matrix: {cfg.raw['channels']['scattering_length_matrix']}\n")
    stream.write(f"# kind: {curve.kind}; " + "; ".join(f"{k}={v}" for k, v in curve.meta.items()) + "\n")
    header = ["angle_deg", "dcs"] if is_dcs else ["energy_eV", "ics"]
    extra_columns = extra_columns or {}
    stream.write(",".join(header + list(extra_columns)) + "\n")
    for i, (x, y) in enumerate(zip(curve.abscissa, curve.values)):
        row = [_fmt(x), _fmt(y * scale)] + [str(col[i]) for col in extra_columns.values()]
        stream.write(",".join(row) + "\n")


def _output_targets(out: str | None, labels: list[str]):
    """One path (or None for stdout) per curve label."""
    if len(labels) == 1:
        return [Path(out) if out else None]
    base = Path(out) if out else Path(f"{labels[0].split('_')[0]}.csv")
    return [base.with_name(f"{base.stem}_{label.split('_', 1)[1]}{base.suffix or '.csv'}") for label in labels]


def _emit(curves, cfg_by_label, units, out):
    labels = list(curves)
    for label, target in zip(labels, _output_targets(out, labels)):
        curve, extra = curves[label]
        if target is None:
            write_csv(curve, cfg_by_label[label], units, sys.stdout, extra)
        else:
            with open(target, "w", newline="\n") as fh:
                write_csv(curve, cfg_by_label[label], units, fh, extra)
            print(f"wrote {target}", file=sys.stderr)


def _variants(cfg: RunConfig, preset: dict | None, name: str | None):
    """(label, config) pairs, one per b value of the preset."""
    if preset is None or "b_values" not in preset:
        return [(name or "run", cfg)]
    return [(f"{name}_b{b:.2f}", cfg.with_b(b)) for b in preset["b_values"]]


def run_dcs(cfg, e_in_eV, n, v, vp=None, angle_step=None, numerics=None):
    model = cfg.channel_model()
    num = numerics or cfg.numerics()
    step = angle_step or cfg.output()["angle_step_deg"]
    ang_deg = angle_grid(step)
    e_in = e_in_eV / HARTREE_EV
    ground = cfg.morse_state(0)
    meta = {"channel": n, "v": v, "E_eV": e_in_eV}
    try:
        if vp is None:
            kin = kinematics(model, e_in)
            if not kin.is_open(n):
                raise KinematicsError(f"channel {n} closed at E={e_in_eV:g} eV")
            values = dcs_pure(model, ground, v, e_in, n, np.radians(ang_deg), n_nodes=num["n_nodes"])
            return CrossSectionCurve("dcs_pure", ang_deg, values, meta)
        excited = _excited_state(cfg, n)
        kin = vib_kinematics(model, ground, excited, v, vp, e_in, n)
        if not kin.is_open(n):
            raise KinematicsError(f"channel {n} (v'={vp}) closed at E={e_in_eV:g} eV")
        values = dcs_vib(model, ground, excited, v, vp, e_in, n, np.radians(ang_deg), **num)
        return CrossSectionCurve("dcs_vib", ang_deg, values, {**meta, "vp": vp})
    except ClosedChannelError as exc:
        raise KinematicsError(str(exc)) from None


def _excited_state(cfg, n):
    state = cfg.morse_state(n)
    if state is None:
        raise ConfigError(f"morse[{n}] is required for electron-vibrational transitions")
    return state


def run_ics(cfg, e_lo, e_hi, step, n, v, vp=None, numerics=None):
    model = cfg.channel_model()
    num = numerics or cfg.numerics()
    energies = energy_grid(e_lo, e_hi, step)
    ground = cfg.morse_state(0)
    excited = _excited_state(cfg, n) if vp is not None else None
    values, below = [], []
    for e_eV in energies:
        e_in = e_eV / HARTREE_EV
        if vp is None:
            kin = kinematics(model, e_in)
        else:
            kin = vib_kinematics(model, ground, excited, v, vp, e_in, n)
        if not kin.is_open(n):
            values.append(0.0)
            below.append(1)
            continue
        below.append(0)
        if vp is None:
            values.append(ics_pure(model, ground, v, e_in, n, n_nodes=num["n_nodes"]))
        else:
            values.append(ics_vib(model, ground, excited, v, vp, e_in, n, **num))
    meta = {"channel": n, "v": v} if vp is None else {"channel": n, "v": v, "vp": vp}
    curve = CrossSectionCurve("ics_pure" if vp is None else "ics_vib", energies, values, meta)
    return curve, below


def run_vib(cfg, state_index, v_list, samples=0):
    state = cfg.morse_state(state_index)
    if state is None:
        raise ConfigError(f"morse[{state_index}] is not configured")
    vm = v_max(state)
    bad = [v for v in v_list if v < 0 or v > vm]
    if bad:
        raise ConfigError(f"v={bad[0]} exceeds v_max={vm} for morse[{state_index}]")
    levels = [(v, energy_level(state, v)) for v in v_list]
    waves = []
    if samples:
        rule = reference_grid(state, max(v_list))
        R = np.linspace(*rule.interval, samples)
        for v in v_list:
            waves.append((v, R, vib_harmonic(state, v)(R)))
    return levels, waves


def _parse_v_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _load(args) -> tuple[RunConfig, dict | None]:
    preset = None
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        preset = PRESETS[args.preset]
        if preset["command"] != args.command and args.command != "validate":
            raise ConfigError(f"preset {args.preset} is for the '{preset['command']}' command")
    if args.config:
        cfg = RunConfig.load(args.config)
    elif preset is not None:
        cfg = RunConfig.default()
    else:
        raise ConfigError("--config FILE is required (or pick a --preset)")
    return cfg, preset


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zrp", description="Matrix zero-range-potential e + diatomic scattering")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--preset", help=f"one of {', '.join(sorted(PRESETS))}")
        p.add_argument("--out", help="output CSV (stdout if omitted)")
        p.add_argument("--units", choices=UNITS, help="cross-section units")
        return p

    p = common(sub.add_parser("dcs", help="differential cross section vs angle"))
    p.add_argument("--energy", type=float, help="incident energy, eV")
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--v", type=int, default=None)
    p.add_argument("--vp", type=int, default=None, help="final vibrational level (omit for pure electronic)")
    p.add_argument("--angle-step", type=float, default=None, help="degrees")

    p = common(sub.add_parser("ics", help="integral cross section vs energy"))
    p.add_argument("--e-lo", type=float)
    p.add_argument("--e-hi", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--channel", type=int, default=None)
    p.add_argument("--v", type=int, default=None)
    p.add_argument("--vp", type=int, default=None)

    p = common(sub.add_parser("vib", help="vibrational ladder and harmonics"))
    p.add_argument("--state", type=int, default=0)
    p.add_argument("--v-list", default="0", help="e.g. 0,1,2 or 0-16")
    p.add_argument("--samples", type=int, default=0, help="number of R samples per harmonic")

    p = common(sub.add_parser("validate", help="run the oracle suite"))
    p.add_argument("--energy", type=float, default=15.0, help="incident energy, eV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, preset = _load(args)
        units = args.units or cfg.output()["units"]
        preset = preset or {}
        if args.command == "dcs":
            return _cmd_dcs(args, cfg, preset, units)
        if args.command == "ics":
            return _cmd_ics(args, cfg, preset, units)
        if args.command == "vib":
            return _cmd_vib(args, cfg)
        return _cmd_validate(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KinematicsError as exc:
        print(f"kinematics error: {exc}", file=sys.stderr)
        return EXIT_KINEMATICS


def _pick(value, preset, key, default=None):
    if value is not None:
        return value
    return preset.get(key, default)


def _cmd_dcs(args, cfg, preset, units):
    energy = _pick(args.energy, preset, "energy_eV")
    if energy is None:
        raise ConfigError("--energy is required")
    n = _pick(args.channel, preset, "channel", 1)
    v = _pick(args.v, preset, "v", 0)
    curves, cfgs = {}, {}
    for label, variant in _variants(cfg, preset or None, args.preset):
        curves[label] = (run_dcs(variant, energy, n, v, args.vp, args.angle_step), None)
        cfgs[label] = variant
    _emit(curves, cfgs, units, args.out)
    return EXIT_OK


def _cmd_ics(args, cfg, preset, units):
    grid = preset.get("energy_grid_eV", cfg.output()["energy_grid_eV"])
    lo = grid[0] if args.e_lo is None else args.e_lo
    hi = grid[1] if args.e_hi is None else args.e_hi
    step = grid[2] if args.step is None else args.step
    if not step > 0:
        raise ConfigError("--step must be > 0")
    n = _pick(args.channel, preset, "channel", 1)
    v = _pick(args.v, preset, "v", 0)
    curves, cfgs = {}, {}
    for label, variant in _variants(cfg, preset or None, args.preset):
        curve, below = run_ics(variant, lo, hi, step, n, v, args.vp)
        curves[label] = (curve, {"below_threshold": below})
        cfgs[label] = variant
    _emit(curves, cfgs, units, args.out)
    return EXIT_OK


def _cmd_vib(args, cfg):
    v_list = _parse_v_list(args.v_list)
    levels, waves = run_vib(cfg, args.state, v_list, args.samples)
    stream = open(args.out, "w", newline="\n") if args.out else sys.stdout
    try:
        stream.write("# zrp-multichannel\n")
        stream.write(f"# config-sha256: {cfg.digest()}\n")
        stream.write(f"# units: energy hartree, R bohr (half internuclear distance), X bohr^-1/2; state={args.state}\n")
        stream.write("v,E_hartree\n")
        for v, e in levels:
            stream.write(f"{v},{_fmt(e)}\n")
        if waves:
            stream.write("# harmonics\n")
            stream.write("v,R,X\n")
            for v, R, X in waves:
                for r, x in zip(R, X):
                    stream.write(f"{v},{_fmt(r)},{_fmt(x)}\n")
    finally:
        if args.out:
            stream.close()
    return EXIT_OK


def _cmd_validate(args, cfg):
    try:
        checks = run_checks(cfg, energy_eV=args.energy)
    except ClosedChannelError as exc:
        raise KinematicsError(str(exc)) from None
    for check in checks:
        print(check.line())
    ok = all(c.passed for c in checks)
    failed = [c.name for c in checks if not c.passed]
    summary = {"ok": ok, "config_sha256": cfg.digest(), "failed": failed, "checks": [c.as_dict() for c in checks]}
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n")
    else:
        print(json.dumps(summary))
    if not ok:
        print("validation failed: " + ", ".join(failed), file=sys.stderr)
    return EXIT_OK if ok else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
