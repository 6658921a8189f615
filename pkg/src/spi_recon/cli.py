"""Batch command-line interface.

Subcommands: gen-patterns, simulate, reconstruct, benchmark, metrics.
Exit codes: 0 success, 1 usage error, 2 runtime/numerical failure.
"""

import argparse
import csv
import os
import sys

from . import bench
from . import io as spio
from .errors import (
    FormatError,
    InvalidArgumentError,
    NumericalFailureError,
    SingularSystemError,
    UnknownSolverError,
)
from .metrics import normalized_rmse
from .model import NoiseModel, add_noise, generate_patterns, synthesize
from .solvers import StopCriteria, get_solver

__all__ = ["main"]


class _UsageExit(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="spi-recon", description="Single-pixel imaging toolbox")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-patterns", help="generate a random pattern bundle")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--width", type=int, required=True)
    g.add_argument("--height", type=int, required=True)
    g.add_argument("--dist", choices=["uniform01", "binary"], default="uniform01")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="synthesize (optionally noisy) measurements")
    s.add_argument("--patterns", required=True)
    s.add_argument("--scene", required=True)
    s.add_argument("--noise-level", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    r = sub.add_parser("reconstruct", help="reconstruct a scene from bundles")
    r.add_argument("--solver", required=True)
    r.add_argument("--patterns", required=True)
    r.add_argument("--measurements", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--trace", default=None)
    r.add_argument("--threshold", type=float, default=1e-2)
    r.add_argument("--min-iter", type=int, default=30)
    r.add_argument("--max-iter-factor", type=float, default=3.0)

    b = sub.add_parser("benchmark", help="run a sweep described by a config file")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--desk", action="store_true")
    b.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    m = sub.add_parser("metrics", help="print normalized RMSE of two PGMs")
    m.add_argument("--truth", required=True)
    m.add_argument("--estimate", required=True)
    return p


def _infer_shape(n: int):
    """Bundles carry only the pixel count; recover a square (or near) shape."""
    w = int(round(n**0.5))
    while w > 1 and n % w:
        w -= 1
    return w, n // w


def _run(args) -> int:
    if args.command == "gen-patterns":
        patterns = generate_patterns(args.m, args.width, args.height,
                                     args.dist, seed=args.seed)
        spio.write_patterns(patterns, args.out)
    elif args.command == "simulate":
        patterns = spio.read_patterns(args.patterns)
        scene = spio.read_image(args.scene)
        meas = synthesize(patterns, scene)
        if args.noise_level > 0:
            noise = NoiseModel(level=args.noise_level, pixel_count=patterns.n)
            meas = add_noise(meas, noise, seed=args.seed)
        spio.write_measurements(meas, patterns.n, args.out)
    elif args.command == "reconstruct":
        solver = get_solver(args.solver)
        patterns = spio.read_patterns(args.patterns)
        meas, n = spio.read_measurements(args.measurements)
        if n != patterns.n:
            raise InvalidArgumentError(
                f"measurement bundle pixel count {n} != pattern pixel count {patterns.n}"
            )
        width, height = _infer_shape(patterns.n)
        stop = StopCriteria(residual_change_threshold=args.threshold,
                            min_iterations=args.min_iter,
                            max_iterations_factor=args.max_iter_factor)
        report = solver(patterns, meas, width, height, stop=stop)
        spio.write_image(report.image, args.out)
        if args.trace:
            with open(args.trace, "w", newline="") as f:
                w = csv.writer(f)
                w.writerow(["iteration", "residual_norm", "objective"])
                for k, rnorm, obj in report.trace:
                    w.writerow([k, f"{rnorm:.9g}", f"{obj:.9g}"])
    elif args.command == "benchmark":
        with open(args.config) as f:
            spec = bench.parse_sweep_config(f.read())
        if args.desk:
            spec = bench.desk_preset(spec)
        rows = bench.run_sweep(spec, jobs=args.jobs)
        spio.write_results_csv(rows, args.out)
    elif args.command == "metrics":
        truth = spio.read_image(args.truth)
        estimate = spio.read_image(args.estimate)
        print(f"{normalized_rmse(truth, estimate):.9f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageExit as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InvalidArgumentError, UnknownSolverError) as exc:
        stage = getattr(exc, "args", [""])[0]
        print(f"usage error: {stage}", file=sys.stderr)
        return 1
    except (FormatError, SingularSystemError, NumericalFailureError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def console_entry():  # pyproject entry point
    raise SystemExit(main())
