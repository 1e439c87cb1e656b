"""Command-line front end: ``scrollforge simulate | analyze | verify``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    ChaosReport,
    Chaos01Config,
    chaos01_K,
    lle_benettin,
    occupancy,
    symbol_sequence,
)
from .errors import (
    DegenerateSeries,
    DimensionError,
    Divergence,
    NoMatchingRegion,
    NotSingleZeroEigenvalue,
    SchemaError,
)
from .integrator import (
    IntegrationConfig,
    integrate,
    write_trajectory_csv,
    write_transitions_csv,
)
from .pwl_core import equilibrium_report, has_equilibrium, numerical_rank
from .systems import resolve_system

EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


def _x0(text: str) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(parts)


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get("SCROLLFORGE_OUT") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args, duration: float) -> IntegrationConfig:
    try:
        return IntegrationConfig(args.x0, duration, args.step, args.sample_every)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _write_manifest(out: Path, args, command: str) -> None:
    manifest = {
        "command": command,
        "system": args.system,
        "x0": [float(v) for v in args.x0],
        "duration": args.duration,
        "step": args.step,
        "sample_every": args.sample_every,
    }
    for key in ("seed", "no_lle", "no_k"):
        if hasattr(args, key):
            manifest[key] = getattr(args, key)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_simulate(args) -> int:
    system = resolve_system(args.system)
    cfg = _config(args, args.duration if args.duration is not None else 50.0)
    traj = integrate(system, cfg)
    out = _out_dir(args)
    write_trajectory_csv(traj, out / "trajectory.csv")
    write_transitions_csv(traj, out / "transitions.csv")
    _write_manifest(out, args, "simulate")
    print(f"system: {system.name or args.system}")
    print(f"duration: {cfg.n_steps * cfg.step:g}  samples: {len(traj)}  transitions: {len(traj.transitions)}")
    print(f"max|x|: {traj.max_abs:.6g}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'transitions.csv'}")
    return 0


def cmd_analyze(args) -> int:
    system = resolve_system(args.system)
    k_cfg = Chaos01Config.seeded(args.seed)
    # default length yields exactly the N samples the 0-1 test needs
    duration = args.duration
    if duration is None:
        duration = k_cfg.series_length * args.step * args.sample_every
    cfg = _config(args, duration)
    traj = integrate(system, cfg)
    report = ChaosReport(symbols=symbol_sequence(traj), region_occupancy=occupancy(traj))
    if not args.no_k:
        if len(traj) < k_cfg.series_length:
            raise InputError(
                f"0-1 test needs {k_cfg.series_length} samples; run has {len(traj)}"
            )
        report.k_median, report.k_per_c = chaos01_K(traj, k_cfg)
    if not args.no_lle:
        lle_cfg = IntegrationConfig(args.x0, args.lle_duration, args.step)
        report.lle = lle_benettin(system, lle_cfg, transient=args.lle_transient)
    out = _out_dir(args)
    (out / "report.json").write_text(report.to_json())
    if report.k_median is not None:
        report.write_kc_csv(out / "kc.csv")
    _write_manifest(out, args, "analyze")
    if report.k_median is not None:
        print(f"K (median over {len(report.k_per_c)} c): {report.k_median:.4f}")
    if report.lle is not None:
        print(f"largest Lyapunov exponent: {report.lle:.4f}")
    print(f"symbols: {report.symbols[:60]}{'...' if len(report.symbols) > 60 else ''}")
    print(f"wrote {out / 'report.json'}")
    return 0


def cmd_verify(args) -> int:
    system = resolve_system(args.system)
    rows = equilibrium_report(system)
    for piece, r in zip(system.pieces, rows):
        name = piece.label or f"piece {r.piece_index}"
        rank = numerical_rank(piece.a_matrix)
        if r.kind == "none":
            detail = f"rank {rank}, no equilibrium (B outside column space)"
        elif r.kind == "point":
            where = "inside" if r.inside_guard else "outside"
            detail = f"virtual equilibrium {np.round(r.point, 6).tolist()} {where} guard"
        else:
            where = "meets" if r.inside_guard else "misses"
            detail = (f"rank {rank}, equilibrium set through {np.round(r.point, 6).tolist()} "
                      f"{where} guard")
        solvable = has_equilibrium(piece.a_matrix, piece.b_vector)
        print(f"{name:>10}: has_equilibrium={str(solvable).lower():5}  {detail}")
    free = not any(r.inside_guard for r in rows)
    print(f"equilibrium-free: {'yes' if free else 'no'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scrollforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sample_every):
        p.add_argument("--system", required=True,
                       help="example1-double | example1-triple | example2-triple | file:<path>")
        p.add_argument("--x0", type=_x0, default=np.zeros(3), help="initial state a,b,c")
        p.add_argument("--duration", type=float, default=None)
        p.add_argument("--step", type=float, default=0.01)
        p.add_argument("--sample-every", type=int, default=sample_every)
        p.add_argument("--out", default=None, help="output directory (default $SCROLLFORGE_OUT or .)")

    p = sub.add_parser("simulate", help="integrate and write trajectory.csv / transitions.csv")
    common(p, 1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="0-1 test, Lyapunov exponent and symbols -> report.json")
    common(p, 25)
    p.add_argument("--seed", type=int, default=42, help="seed for the 0-1 test c values")
    p.add_argument("--no-lle", action="store_true")
    p.add_argument("--no-k", action="store_true")
    p.add_argument("--lle-duration", type=float, default=500.0)
    p.add_argument("--lle-transient", type=float, default=50.0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="per-piece equilibrium analysis")
    p.add_argument("--system", required=True)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, DimensionError, NotSingleZeroEigenvalue, InputError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (Divergence, NoMatchingRegion, DegenerateSeries) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
