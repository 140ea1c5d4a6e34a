"""Command-line harness: run configuration, experiment orchestration, file output.

Subcommands: evolve, scan [--k0], trace, perturb, speed-profile. Global flags:
--config PATH (INI file with one section per subcommand), --out DIR,
--workers N, --seed-from FILE, --dump-config. Flags override config-file
values, which override built-in defaults.

Exit codes: 0 ok, 2 usage/configuration error, 3 divergence, 4 trace lost,
5 requested point off the instability curve.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import instability, planar
from .errors import (
    ConfigurationError,
    DivergenceError,
    NVLabError,
    OffCurveError,
    TraceLostError,
)
from .evolver import SchemeParams, evolve
from .experiments import run_growth_experiment, torus_soliton_speed
from .grid import RealField, make_grid, write_snapshot
from .instability import (
    PerturbationParams,
    admissible_y_width,
    det_mismatch,
    det_mismatch_k0,
    find_zero_gamma,
    perturbation_shape,
    trace_instability_curve,
    unstable_band,
)
from .planar import speed_profile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3
EXIT_TRACE_LOST = 4
EXIT_OFF_CURVE = 5

DEFAULTS: dict[str, dict[str, str]] = {
    "evolve": {
        "preset": "soliton",          # soliton | zero
        "Wx": repr(12.0 * math.pi),
        "Wy": repr(4.0 * math.pi),
        "L": "256",
        "M": "8",
        "c": "1.0",
        "x0": "nan",                  # nan -> Wx/2
        "dt": "1e-3",
        "theta": "0.5",
        "t_final": "5.0",
        "dealias": "false",
        "first_step": "exact_reference",
        "stride": "100",
        "snapshots": "true",
    },
    "scan": {
        "k_min": "0.0",
        "k_max": "1.0",
        "gamma_min": "0.0",
        "gamma_max": "0.5",
        "nk": "101",
        "ngamma": "51",
        "x_match": "12.0",
        "method": "bidirectional",
        "ngamma_k0": "200",
    },
    "trace": {
        "seed_k": "0.9",
        "seed_gamma": "nan",          # nan -> locate by a sign scan in gamma
        "step": "0.01",
        "max_points": "600",
        "x_match": "12.0",
    },
    "perturb": {
        "k": "0.504",
        "gamma": "0.296",
        "epsilon": "0.01",
        "c": "1.0",
        "L": "256",
        "M": "64",
        "Wx": repr(12.0 * math.pi),
        "n_periods": "2",
        "dt": "1e-3",
        "theta": "0.5",
        "t_final": "5.0",
        "x_match": "12.0",
        "stride": "50",
        "refine": "true",
    },
    "speed-profile": {
        "c": "1.0",
        "n_samples": "360",
    },
}

FLOAT_FMT = "%.17g"


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (int, float, np.floating))
                             and not isinstance(v, bool) else str(v) for v in row])


class RunConfig:
    """Per-subcommand key-value settings with defaults < file < flags."""

    def __init__(self, section: str, config_path: Optional[str],
                 overrides: dict[str, str]):
        self.section = section
        self.values = dict(DEFAULTS[section])
        if config_path:
            parser = configparser.ConfigParser()
            read = parser.read(config_path)
            if not read:
                raise ConfigurationError(f"config file {config_path!r} not found")
            if parser.has_section(section):
                for key, val in parser.items(section):
                    if key not in self.values:
                        raise ConfigurationError(
                            f"unknown key {key!r} in config section [{section}]")
                    self.values[key] = val
        for key, val in overrides.items():
            self.values[key] = str(val)

    def get_float(self, key: str) -> float:
        try:
            return float(self.values[key])
        except ValueError as exc:
            raise ConfigurationError(f"[{self.section}] {key}={self.values[key]!r} "
                                     "is not a number") from exc

    def get_int(self, key: str) -> int:
        try:
            return int(self.values[key])
        except ValueError as exc:
            raise ConfigurationError(f"[{self.section}] {key}={self.values[key]!r} "
                                     "is not an integer") from exc

    def get_bool(self, key: str) -> bool:
        val = self.values[key].strip().lower()
        if val in ("1", "true", "yes", "on"):
            return True
        if val in ("0", "false", "no", "off"):
            return False
        raise ConfigurationError(f"[{self.section}] {key}={self.values[key]!r} "
                                 "is not a boolean")

    def get_str(self, key: str) -> str:
        return self.values[key]


def dump_config(stream=None) -> None:
    """Print every section with its built-in defaults in config-file syntax."""
    stream = stream or sys.stdout
    parser = configparser.ConfigParser()
    for section, values in DEFAULTS.items():
        parser[section] = values
    parser.write(stream)


# --- subcommands ---------------------------------------------------------------


def cmd_evolve(cfg: RunConfig, out_dir: Path) -> int:
    Wx, Wy = cfg.get_float("Wx"), cfg.get_float("Wy")
    grid = make_grid(Wx, Wy, cfg.get_int("L"), cfg.get_int("M"))
    c = cfg.get_float("c")
    x0 = cfg.get_float("x0")
    if math.isnan(x0):
        x0 = Wx / 2.0
    preset = cfg.get_str("preset")
    first_step = cfg.get_str("first_step")
    reference = None
    if preset == "soliton":
        # travels at the periodic-gauge speed (zero-mean auxiliary fields)
        V = torus_soliton_speed(c, Wx)
        rc = math.sqrt(c)

        def reference(t):
            prof = -2.0 * c / np.cosh(rc * (grid.x - x0 - V * t)) ** 2
            return np.broadcast_to(prof[:, None], grid.shape).copy()

        u0 = RealField(grid, reference(0.0))
    elif preset == "zero":
        u0 = RealField(grid, np.zeros(grid.shape))
        first_step = "copy_previous"
    else:
        raise ConfigurationError(f"unknown preset {preset!r} (soliton or zero)")

    params = SchemeParams(dt=cfg.get_float("dt"), theta=cfg.get_float("theta"),
                          dealias=cfg.get_bool("dealias"),
                          first_step=first_step, reference=reference)
    stride = cfg.get_int("stride")
    snapshots = cfg.get_bool("snapshots")

    rows = []
    idx = 0
    try:
        for state, diag in evolve(u0, cfg.get_float("t_final"), params,
                                  observer_stride=stride):
            rows.append((diag.time, diag.l2_norm, diag.mean, diag.max_abs))
            if snapshots:
                write_snapshot(out_dir / f"snapshot_{idx:06d}.nvg", state.u, state.t)
            idx += 1
    except DivergenceError as exc:
        _write_csv(out_dir / "diagnostics.csv",
                   ["t", "l2_norm", "mean", "max_abs"], rows)
        print(f"evolve: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    _write_csv(out_dir / "diagnostics.csv",
               ["t", "l2_norm", "mean", "max_abs"], rows)
    print(f"evolve: wrote {len(rows)} diagnostics rows to {out_dir}")
    return EXIT_OK


def _scan_point(args) -> tuple[float, float, float]:
    k, gamma, x_match, method = args
    try:
        _, residual = det_mismatch(k, gamma, x_match, method=method)
    except NVLabError:
        residual = math.nan  # resonance / complex roots: sentinel, not omitted
    return k, gamma, residual


def cmd_scan(cfg: RunConfig, out_dir: Path, workers: int, k0: bool) -> int:
    x_match = cfg.get_float("x_match")
    if k0:
        gammas = np.linspace(cfg.get_float("gamma_min"), cfg.get_float("gamma_max"),
                             cfg.get_int("ngamma_k0"))
        rows = [(g, det_mismatch_k0(g, x_match)) for g in gammas]
        _write_csv(out_dir / "scan_k0.csv", ["gamma", "D0"], rows)
        print(f"scan: wrote {len(rows)} rows to {out_dir / 'scan_k0.csv'}")
        return EXIT_OK
    ks = np.linspace(cfg.get_float("k_min"), cfg.get_float("k_max"), cfg.get_int("nk"))
    gammas = np.linspace(cfg.get_float("gamma_min"), cfg.get_float("gamma_max"),
                         cfg.get_int("ngamma"))
    method = cfg.get_str("method")
    tasks = [(float(k), float(g), x_match, method) for k in ks for g in gammas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_point, tasks, chunksize=32))
    else:
        results = [_scan_point(t) for t in tasks]
    rows = [(k, g, r, method) for (k, g, r) in results]
    _write_csv(out_dir / "scan.csv", ["k", "gamma", "normalized_absD", "method"], rows)
    print(f"scan: wrote {len(rows)} rows to {out_dir / 'scan.csv'}")
    return EXIT_OK


def _seed_from_scan(path: str) -> tuple[float, float]:
    """Pick the smallest-|D| interior point of a previous scan CSV as a seed."""
    best = None
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            k = float(row["k"])
            gamma = float(row["gamma"])
            val = float(row["normalized_absD"])
            if not math.isfinite(val) or gamma <= 0.01 or k <= 0.05:
                continue
            if best is None or val < best[0]:
                best = (val, k, gamma)
    if best is None:
        raise ConfigurationError(f"no usable seed rows in scan file {path!r}")
    return best[1], best[2]


def cmd_trace(cfg: RunConfig, out_dir: Path, seed_from: Optional[str]) -> int:
    x_match = cfg.get_float("x_match")
    seed_k = cfg.get_float("seed_k")
    seed_gamma = cfg.get_float("seed_gamma")
    if seed_from:
        seed_k, seed_gamma = _seed_from_scan(seed_from)
    try:
        if math.isnan(seed_gamma):
            seed_gamma = find_zero_gamma(seed_k, 0.01, 0.45, x_match)
        else:
            seed_gamma = find_zero_gamma(seed_k, max(1e-4, seed_gamma - 0.05),
                                         seed_gamma + 0.05, x_match)
        # secant direction from a nearby second on-curve point
        k2 = seed_k - 0.01
        gamma2 = find_zero_gamma(k2, max(1e-4, seed_gamma - 0.05),
                                 seed_gamma + 0.05, x_match)
    except TraceLostError as exc:
        print(f"trace: {exc}", file=sys.stderr)
        return EXIT_TRACE_LOST
    direction = np.array([k2 - seed_k, gamma2 - seed_gamma])
    direction /= np.linalg.norm(direction)
    try:
        result = trace_instability_curve((seed_k, seed_gamma),
                                         tuple(direction),
                                         step=cfg.get_float("step"),
                                         max_points=cfg.get_int("max_points"),
                                         x_match=x_match)
    except TraceLostError as exc:
        print(f"trace: {exc}", file=sys.stderr)
        if exc.last_point is not None:
            p = exc.last_point
            print(f"trace: last good point k={_fmt(p.k)} gamma={_fmt(p.gamma)} "
                  f"s={_fmt(p.s)}", file=sys.stderr)
        return EXIT_TRACE_LOST
    rows = [(p.s, p.k, p.gamma, p.residual) for p in result.points]
    _write_csv(out_dir / "trace.csv", ["s", "k", "gamma", "residual"], rows)
    k_min, k_max = unstable_band(result.points)
    band_line = (f"band k_min={_fmt(k_min)} k_max={_fmt(k_max)} "
                 f"closed={str(result.closed).lower()}")
    print(band_line)
    (out_dir / "band.txt").write_text(band_line + "\n")
    print(f"trace: wrote {len(rows)} points to {out_dir / 'trace.csv'}")
    return EXIT_OK


def _running_slope(times: np.ndarray, devs: np.ndarray, window: int = 10) -> np.ndarray:
    out = np.full(times.size, math.nan)
    logd = np.log(np.maximum(devs, 1e-300))
    for i in range(1, times.size):
        lo = max(0, i - window + 1)
        if times[i] > times[lo]:
            out[i] = np.polyfit(times[lo:i + 1], logd[lo:i + 1], 1)[0]
    return out


def cmd_perturb(cfg: RunConfig, out_dir: Path) -> int:
    k = cfg.get_float("k")
    gamma = cfg.get_float("gamma")
    x_match = cfg.get_float("x_match")
    gamma_input = gamma
    if cfg.get_bool("refine") and k > 0:
        try:
            gamma = find_zero_gamma(k, max(1e-4, gamma - 0.02), gamma + 0.02, x_match)
        except TraceLostError:
            _, residual = det_mismatch(k, gamma, x_match)
            print(f"perturb: ({k}, {gamma}) is off the instability curve "
                  f"(normalized |D| = {residual:.3g}, no nearby zero)", file=sys.stderr)
            return EXIT_OFF_CURVE
    try:
        shape = perturbation_shape(k, gamma, x_match)
    except OffCurveError as exc:
        print(f"perturb: {exc}", file=sys.stderr)
        return EXIT_OFF_CURVE

    _write_csv(out_dir / "shape.csv", ["x", "f", "g", "h_imag"],
               zip(shape.xs, shape.f, shape.g, shape.h_imag))

    c = cfg.get_float("c")
    params = PerturbationParams(k=k, gamma=gamma, epsilon=cfg.get_float("epsilon"),
                                c=c, x_match=x_match)
    Wx = cfg.get_float("Wx")
    if k > 0:
        Wy = admissible_y_width(k, c, n_periods=cfg.get_int("n_periods"))
    else:
        Wy = 4.0 * math.pi
    grid = make_grid(Wx, Wy, cfg.get_int("L"), cfg.get_int("M"))

    try:
        result = run_growth_experiment(shape, params, grid,
                                       dt=cfg.get_float("dt"),
                                       t_final=cfg.get_float("t_final"),
                                       observer_stride=cfg.get_int("stride"),
                                       theta=cfg.get_float("theta"))
    except DivergenceError as exc:
        print(f"perturb: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE

    running = _running_slope(result.times, result.deviations)
    _write_csv(out_dir / "deviation.csv", ["t", "deviation_l2", "gamma_running"],
               zip(result.times, result.deviations, running))

    summary = {
        "k": k,
        "gamma_input": gamma_input,
        "gamma": gamma,
        "epsilon": params.epsilon,
        "c": c,
        "grid": {"Wx": grid.Wx, "Wy": grid.Wy, "L": grid.L, "M": grid.M},
        "dt": cfg.get_float("dt"),
        "t_final": cfg.get_float("t_final"),
        "gamma_est": result.gamma_est,
        "r_squared": result.r_squared,
        "profile_correlation": result.profile_correlation,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"perturb: gamma_est={_fmt(result.gamma_est)} "
          f"r2={_fmt(result.r_squared)} "
          f"correlation={_fmt(result.profile_correlation)}")
    return EXIT_OK


def cmd_speed_profile(cfg: RunConfig, out_dir: Path) -> int:
    rows = speed_profile(cfg.get_float("c"), cfg.get_int("n_samples"))
    _write_csv(out_dir / "speed_profile.csv", ["alpha", "kappa", "speed"], rows)
    print(f"speed-profile: wrote {rows.shape[0]} rows to "
          f"{out_dir / 'speed_profile.csv'}")
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--workers", metavar="N", type=int,
                        default=os.cpu_count() or 1,
                        help="worker processes for parallel scans")
    common.add_argument("--seed-from", metavar="FILE", dest="seed_from",
                        help="seed the tracer from a previous scan CSV")
    common.add_argument("--dump-config", action="store_true", dest="dump_config",
                        help="print all defaults in config-file syntax and exit")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        dest="overrides",
                        help="override a config key of this subcommand")

    parser = argparse.ArgumentParser(
        prog="nvlab",
        description="Numerical laboratory for the Novikov-Veselov equation",
    )
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("evolve", parents=[common],
                   help="time-evolve initial data, write snapshots + diagnostics")
    p_scan = sub.add_parser("scan", parents=[common],
                            help="evaluate the mismatch determinant over a grid")
    p_scan.add_argument("--k0", action="store_true",
                        help="scan the k = 0 determinant along gamma instead")
    sub.add_parser("trace", parents=[common],
                   help="trace the zero curve of the mismatch determinant")
    sub.add_parser("perturb", parents=[common],
                   help="run the perturbed-soliton growth experiment end to end")
    sub.add_parser("speed-profile", parents=[common],
                   help="emit the planar-soliton speed profile")
    return parser


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = value.strip()
    return out


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    if args.dump_config:
        dump_config()
        return EXIT_OK
    try:
        overrides = _parse_overrides(args.overrides)
        for key in overrides:
            if key not in DEFAULTS[args.command]:
                raise ConfigurationError(
                    f"unknown key {key!r} for subcommand {args.command!r}")
        cfg = RunConfig(args.command, args.config, overrides)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "evolve":
            return cmd_evolve(cfg, out_dir)
        if args.command == "scan":
            return cmd_scan(cfg, out_dir, args.workers, args.k0)
        if args.command == "trace":
            return cmd_trace(cfg, out_dir, args.seed_from)
        if args.command == "perturb":
            return cmd_perturb(cfg, out_dir)
        if args.command == "speed-profile":
            return cmd_speed_profile(cfg, out_dir)
        parser.error(f"unknown command {args.command!r}")
    except ConfigurationError as exc:
        print(f"nvlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
