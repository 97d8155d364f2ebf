"""wavebound — Command-line front end.

    python main.py bounds  --g 1 --omega 1 --m 1
    python main.py solve   --g 1 --omega 1 --m 1 --amplitude 0.005 --output wave.json
    python main.py certify wave.json --output certificate.json
    python main.py certify wave_a.json wave_b.json --workers 2
    python main.py sweep   --g 1 --m 1 --omegas 0.5 1 2 4 8 --format csv --output sweep.csv
    python main.py serve

Exit codes: 0 success, 1 certification failure, 2 usage / parse / config error,
3 solver failure (no convergence, branch terminated, no bifurcation).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any

from pydantic import ValidationError

from wavebound.amplitude_bounds import refined_bound
from wavebound.certify import certify_many, compare_decay_rates, sweep_vorticity
from wavebound.config import HOST, LOG_LEVEL, PORT, configure_logging, load_settings, read_config_file
from wavebound.errors import (
    BifurcationNotFoundError,
    BranchTerminatedError,
    ConfigError,
    ConvergenceError,
    MonotonicityError,
    RootFindingError,
    UnconvergedWaveError,
    WaveFileError,
)
from wavebound.models import BranchSpec, FluidParams, RunConfig
from wavebound.serialization import (
    read_wave,
    write_bounds,
    write_certificate,
    write_sweep_csv,
    write_sweep_json,
    write_wave,
)
from wavebound.stream_flows import stream_window
from wavebound.wave_solver import bifurcation_wavelength, solve_periodic

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3

SOLVER_ERRORS = (BifurcationNotFoundError, ConvergenceError, MonotonicityError, RootFindingError)


# ── Configuration merge ──────────────────────────────────────────────────────

def _run_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> RunConfig:
    """Flags first, then the config file's physical keys on top."""
    values: dict[str, Any] = {
        "g": getattr(args, "g", None),
        "omega": getattr(args, "omega", None),
        "m": getattr(args, "m", None),
        "L": getattr(args, "L", None),
        "amplitude": getattr(args, "amplitude", None),
        "omegas": getattr(args, "omegas", None),
        "output": getattr(args, "output", None),
        "format": getattr(args, "format", None),
    }
    if args.config:
        file_values = read_config_file(args.config)
        for key in ("g", "omega", "m", "amplitude", "output", "format"):
            if key in file_values:
                values[key] = file_values[key]
        if "l" in file_values:
            values["L"] = file_values["l"]
        if "omegas" in file_values:
            values["omegas"] = [w for w in file_values["omegas"].replace(",", " ").split() if w]
    try:
        return RunConfig(**{k: v for k, v in values.items() if v is not None})
    except ValidationError as exc:
        parser.error(f"invalid parameters: {exc}")


def _params(cfg: RunConfig, parser: argparse.ArgumentParser, *keys: str) -> FluidParams:
    missing = [f"--{k}" for k in keys if getattr(cfg, k) is None]
    if missing:
        parser.error(f"missing required parameter(s): {', '.join(missing)}")
    return FluidParams(g=cfg.g, omega=cfg.omega, m=cfg.m)


def _settings(args: argparse.Namespace):
    return load_settings(
        args.config,
        n_x=getattr(args, "n_x", None),
        n_p=getattr(args, "n_p", None),
        max_newton=getattr(args, "max_newton", None),
        amplitude_step=getattr(args, "amplitude_step", None),
        workers=getattr(args, "workers", None),
    )


# ── Commands ─────────────────────────────────────────────────────────────────

def cmd_bounds(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _run_config(args, parser)
    params = _params(cfg, parser, "g", "omega", "m")
    try:
        window = stream_window(params)
        bound = refined_bound(params)
    except SOLVER_ERRORS as exc:
        print(f"❌  {type(exc).__name__}: {exc}")
        return EXIT_SOLVER

    print(f"\n🌊 Bounds for g = {params.g!r}, ω = {params.omega!r}, m = {params.m!r}\n")
    print(f"   s0 = {window.s0!r}    sc = {window.sc!r}")
    print(f"   Q0 = {window.Q0!r}    Qc = {window.Qc!r}")
    print(f"   d0 = {window.d0!r}    ε  = {bound.epsilon!r}")
    print(f"   theorem bound 2g/ω² = {bound.theorem_bound!r}")
    print(f"   refined bound       = {bound.refined_bound!r}  ({bound.branch})\n")

    if cfg.output:
        write_bounds(cfg.output, params, window, bound)
        print(f"   Written to {cfg.output}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _run_config(args, parser)
    params = _params(cfg, parser, "g", "omega", "m")
    settings = _settings(args)
    output = cfg.output or "wave.json"

    try:
        L = cfg.L
        if L is None:
            window = stream_window(params)
            L = bifurcation_wavelength(params, window.s0 + args.window_fraction * (window.sc - window.s0))
            print(f"   L not given; using L = {L!r} from the bifurcation at the {args.window_fraction:g} window point")
        wave = solve_periodic(params, L, cfg.amplitude, settings=settings)
    except BranchTerminatedError as exc:
        print(f"❌  {exc}")
        if exc.last_wave is not None:
            write_wave(output, exc.last_wave)
            print(f"   Last converged wave written to {output}")
        return EXIT_SOLVER
    except SOLVER_ERRORS as exc:
        print(f"❌  {type(exc).__name__}: {exc}")
        return EXIT_SOLVER

    write_wave(output, wave)
    print(f"✅  Converged in {wave.iterations} Newton iteration(s): Q = {wave.Q!r}")
    print(f"   residuals: interior {wave.residuals['interior']:.3e}, surface {wave.residuals['surface']:.3e}")
    print(f"   Written to {output}")
    return EXIT_OK


def cmd_certify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.output and len(args.wavefiles) > 1:
        parser.error("--output takes a single wave file")
    try:
        waves = [read_wave(path) for path in args.wavefiles]
    except WaveFileError as exc:
        print(f"❌  {exc}")
        return EXIT_USAGE
    try:
        certs = certify_many(waves, workers=_settings(args).workers)
    except UnconvergedWaveError as exc:
        print(f"❌  Rejected: {exc}")
        return EXIT_SOLVER
    except SOLVER_ERRORS as exc:
        print(f"❌  {type(exc).__name__}: {exc}")
        return EXIT_SOLVER

    for path, cert in zip(args.wavefiles, certs):
        kind = "stream (Bernoulli-window and depth checks vacuous)" if cert.is_stream else "wave"
        print(f"\n📐 Certificate for {path}: {kind}\n")
        for check in cert.checks.values():
            mark = "—" if check.vacuous else ("✓" if check.passed else "✗")
            margin = "n/a" if check.margin is None else f"{check.margin:+.6e}"
            print(f"   {mark} {check.name:<18} margin {margin}")
        print(f"\n   amplitude {cert.amplitude!r} < 2g/ω² = {cert.theorem_bound!r}")

    if args.output:
        write_certificate(args.output, certs[0])
        print(f"   Written to {args.output}")
    failed = [path for path, cert in zip(args.wavefiles, certs) if not cert.passed]
    if not failed:
        print("✅  All applicable inequalities hold\n")
        return EXIT_OK
    print(f"❌  Certification failed: {', '.join(failed)}\n")
    return EXIT_CERTIFICATION


def cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg = _run_config(args, parser)
    if len(cfg.omegas) < 2:
        parser.error("a sweep needs at least two vorticities (--omegas)")
    missing = [f"--{k}" for k in ("g", "m") if getattr(cfg, k) is None]
    if missing:
        parser.error(f"missing required parameter(s): {', '.join(missing)}")
    base = FluidParams(g=cfg.g, omega=cfg.omegas[0], m=cfg.m)
    settings = _settings(args)
    try:
        spec = BranchSpec(
            target_fraction=args.target_fraction,
            window_fraction=args.window_fraction,
            max_steps=args.max_steps,
        )
    except ValidationError as exc:
        parser.error(f"invalid branch settings: {exc}")

    rows = sweep_vorticity(cfg.omegas, base, spec, settings)
    report = compare_decay_rates(rows) if len(rows) >= 4 else None

    print(f"\n🌊 Sweep over {len(rows)} vorticities\n")
    print(f"   {'ω':>8} {'amplitude':>14} {'2g/ω²':>14} {'refined':>14}  flags")
    for row in rows:
        if row.error:
            print(f"   {row.omega:>8g} {'—':>14} {row.theorem_bound:>14.6e} {row.refined_bound:>14.6e}  {row.error}")
        else:
            print(f"   {row.omega:>8g} {row.amplitude:>14.6e} {row.theorem_bound:>14.6e} {row.refined_bound:>14.6e}  {row.flags}")
    if report is not None:
        print(f"\n   log-log slopes: bound {report.bound_slope:.12f}, refined {report.refined_slope:.6f}", end="")
        if report.amplitude_slope is not None:
            lo, hi = report.amplitude_slope_ci
            print(f", amplitude {report.amplitude_slope:.4f} [{lo:.4f}, {hi:.4f}]", end="")
        print()

    output = cfg.output or f"sweep.{cfg.format}"
    if cfg.format == "csv":
        write_sweep_csv(output, rows)
    else:
        write_sweep_json(output, rows, report)
    print(f"   Written to {output}\n")

    if any(row.error is None for row in rows):
        return EXIT_OK
    return EXIT_SOLVER


def cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import uvicorn

    uvicorn.run("wavebound.api:app", host=args.host, port=args.port, log_level=args.log_level.lower())
    return EXIT_OK


# ── Parser ───────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; its physical parameters override flags")
    common.add_argument("--log-level", default=LOG_LEVEL, help="logging level (DEBUG, INFO, WARNING, ...)")

    physical = argparse.ArgumentParser(add_help=False)
    physical.add_argument("--g", type=float, help="gravitational acceleration")
    physical.add_argument("--m", type=float, help="mass flux")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--n-x", dest="n_x", type=int, help="nodes per wavelength (even)")
    grid.add_argument("--n-p", dest="n_p", type=int, help="nodes across the flux strip")
    grid.add_argument("--max-newton", dest="max_newton", type=int, help="Newton iteration cap")
    grid.add_argument("--amplitude-step", dest="amplitude_step", type=float, help="continuation step, fraction of d0")
    grid.add_argument(
        "--window-fraction", dest="window_fraction", type=float, default=0.75,
        help="laminar parameter s0 + f·(sc − s0) used to pick L",
    )

    parser = argparse.ArgumentParser(
        prog="wavebound",
        description="Wavebound — amplitude bounds for steady water waves with constant vorticity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common, physical], help="print the stream window and amplitude bounds")
    p.add_argument("--omega", type=float, help="vorticity")
    p.add_argument("--output", help="also write the values as JSON")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("solve", parents=[common, physical, grid], help="compute a periodic wave")
    p.add_argument("--omega", type=float, help="vorticity")
    p.add_argument("--L", dest="L", type=float, help="wavelength (default: from --window-fraction)")
    p.add_argument("--amplitude", type=float, help="half crest-to-trough height")
    p.add_argument("--output", help="wave JSON file (default wave.json)")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("certify", parents=[common], help="certify wave files against the bounds")
    p.add_argument("wavefiles", nargs="+", help="wave JSON files written by 'solve'")
    p.add_argument("--workers", type=int, help="parallel certificates")
    p.add_argument("--output", help="certificate JSON file (single wave only)")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("sweep", parents=[common, physical, grid], help="certify waves across vorticities")
    p.add_argument("--omegas", nargs="*", type=float, help="vorticities to sweep")
    p.add_argument(
        "--target-fraction", dest="target_fraction", type=float,
        help="half crest-to-trough target in units of d0 (default: continue to the stagnation stop)",
    )
    p.add_argument("--max-steps", dest="max_steps", type=int, default=60, help="continuation step cap per row")
    p.add_argument("--workers", type=int, help="parallel rows")
    p.add_argument("--format", choices=("json", "csv"), help="table format (default json)")
    p.add_argument("--output", help="table file (default sweep.<format>)")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("serve", parents=[common], help="start the HTTP API")
    p.add_argument("--host", default=HOST)
    p.add_argument("--port", type=int, default=PORT)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args, parser)
    except ConfigError as exc:
        print(f"❌  {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
