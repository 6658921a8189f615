"""Benchmark sweeps: sampling ratio x image size x noise level x repeats.

Every cell is seeded by a stable hash of the base seed and the cell
coordinates, so serial and parallel runs (and reruns) produce identical
results apart from wall time.  Pattern and noise seeds deliberately
exclude the solver name and the noise level: all solvers see the same
data in a cell, and raising the noise level only scales the same noise
draw, keeping noise-level comparisons paired.
"""

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .io import read_image
from .metrics import normalized_rmse
from .model import NoiseModel, add_noise, generate_patterns, synthesize
from .scenes import builtin_scene
from .solvers import StopCriteria, get_solver

__all__ = [
    "SweepSpec",
    "SweepRow",
    "stable_seed",
    "run_cell",
    "run_sweep",
    "summarize",
    "parse_sweep_config",
    "desk_preset",
]


@dataclass
class SweepSpec:
    """Declarative benchmark sweep (Cartesian product of all grids)."""

    scenes: list
    solvers: list
    sampling_ratios: list = field(default_factory=lambda: [0.2, 0.5, 1.0, 2.0, 3.0, 5.0])
    image_sizes: list = field(
        default_factory=lambda: [(32, 32), (64, 64), (96, 96), (128, 128), (160, 160)]
    )
    noise_levels: list = field(default_factory=lambda: [0.0, 1e-4, 5e-4, 1e-3, 3e-3])
    repeats: int = 20
    base_seed: int = 0
    distribution: str = "uniform01"

    def __post_init__(self):
        if not self.scenes or not self.solvers:
            raise InvalidArgumentError("spec needs at least one scene and one solver")
        if self.repeats < 1:
            raise InvalidArgumentError("repeats must be >= 1")
        if any(r <= 0 for r in self.sampling_ratios):
            raise InvalidArgumentError("sampling ratios must be positive")
        if any(w < 2 or h < 2 for w, h in self.image_sizes):
            raise InvalidArgumentError("image sizes must be at least 2x2")


@dataclass
class SweepRow:
    scene: str
    solver: str
    ratio: float
    size: str  # "WxH"
    noise_level: float
    repeat: int
    rmse: Optional[float]
    iterations: int
    wall_time_s: float
    seed: int
    status: str  # "ok" or "failed:<reason>"


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed from arbitrary hashable parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") & (2**63 - 1)


def _load_scene(ref: str, width: int, height: int):
    """Builtin scenes render at the cell size; PGM files keep their own size."""
    if ref.endswith(".pgm"):
        img = read_image(ref)
        return img, img.width, img.height
    return builtin_scene(ref, width, height), width, height


def run_cell(
    scene: str,
    solver: str,
    ratio: float,
    width: int,
    height: int,
    noise_level: float,
    repeat: int,
    base_seed: int = 0,
    stop: Optional[StopCriteria] = None,
    distribution: str = "uniform01",
) -> SweepRow:
    """Synthesize, reconstruct and score one benchmark cell.

    Only the reconstruction is timed, not pattern generation or
    measurement synthesis.
    """
    truth, width, height = _load_scene(scene, width, height)
    n = width * height
    m = int(round(ratio * n))
    size = f"{width}x{height}"
    pattern_seed = stable_seed(base_seed, "patterns", scene, ratio, size, repeat)
    noise_seed = stable_seed(base_seed, "noise", scene, ratio, size, repeat)
    if m < 1:
        raise InvalidArgumentError(f"ratio {ratio} gives zero measurements")

    patterns = generate_patterns(m, width, height, distribution, seed=pattern_seed)
    meas = synthesize(patterns, truth)
    if noise_level > 0:
        meas = add_noise(meas, NoiseModel(level=noise_level, pixel_count=n),
                         seed=noise_seed)
    try:
        fn = get_solver(solver)
        t0 = time.perf_counter()
        report = fn(patterns, meas, width, height, stop=stop)
        elapsed = time.perf_counter() - t0
        rmse = normalized_rmse(truth, report.image)
        return SweepRow(scene, solver, ratio, size, noise_level, repeat,
                        rmse, report.iterations, elapsed, pattern_seed, "ok")
    except Exception as exc:  # failed cells are recorded, never fatal
        reason = str(exc).replace("\n", " ")
        return SweepRow(scene, solver, ratio, size, noise_level, repeat,
                        None, 0, 0.0, pattern_seed, f"failed:{reason}")


def run_sweep(
    spec: SweepSpec, jobs: int = 1, stop: Optional[StopCriteria] = None
) -> list:
    """All cells x repeats; rows come back in deterministic grid order."""
    cells = list(product(spec.scenes, spec.solvers, spec.sampling_ratios,
                         spec.image_sizes, spec.noise_levels, range(spec.repeats)))

    def work(cell):
        scene, solver, ratio, (w, h), level, rep = cell
        return run_cell(scene, solver, ratio, w, h, level, rep,
                        base_seed=spec.base_seed, stop=stop,
                        distribution=spec.distribution)

    if jobs <= 1:
        return [work(c) for c in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, cells))


def summarize(rows) -> list:
    """Mean/std aggregation over repeats per (scene, solver, ratio, size, noise)."""
    groups = {}
    for r in rows:
        groups.setdefault((r.scene, r.solver, r.ratio, r.size, r.noise_level), []).append(r)
    out = []
    for key in sorted(groups, key=str):
        rs = groups[key]
        ok = [r for r in rs if r.status == "ok"]
        rmses = np.array([r.rmse for r in ok]) if ok else np.array([])
        out.append({
            "scene": key[0], "solver": key[1], "ratio": key[2],
            "size": key[3], "noise_level": key[4],
            "repeats": len(rs), "failed": len(rs) - len(ok),
            "rmse_mean": float(rmses.mean()) if ok else float("nan"),
            "rmse_std": float(rmses.std()) if ok else float("nan"),
            "iterations_mean": float(np.mean([r.iterations for r in ok])) if ok else float("nan"),
            "wall_time_mean_s": float(np.mean([r.wall_time_s for r in ok])) if ok else float("nan"),
        })
    return out


def _parse_sizes(text):
    sizes = []
    for part in text.split(","):
        part = part.strip()
        if "x" in part:
            w, h = part.split("x", 1)
            sizes.append((int(w), int(h)))
        else:
            sizes.append((int(part), int(part)))
    return sizes


def parse_sweep_config(text: str) -> SweepSpec:
    """Parse a line-based key=value config into a SweepSpec.

    Keys mirror the SweepSpec fields; lists are comma-separated and
    sizes are "WxH" (or a single number for square).  '#' starts a
    comment.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "scenes":
            kwargs["scenes"] = [s.strip() for s in value.split(",") if s.strip()]
        elif key == "solvers":
            kwargs["solvers"] = [s.strip() for s in value.split(",") if s.strip()]
        elif key == "sampling_ratios":
            kwargs["sampling_ratios"] = [float(s) for s in value.split(",")]
        elif key == "image_sizes":
            kwargs["image_sizes"] = _parse_sizes(value)
        elif key == "noise_levels":
            kwargs["noise_levels"] = [float(s) for s in value.split(",")]
        elif key == "repeats":
            kwargs["repeats"] = int(value)
        elif key == "base_seed":
            kwargs["base_seed"] = int(value)
        elif key == "distribution":
            kwargs["distribution"] = value
        else:
            raise InvalidArgumentError(f"config line {lineno}: unknown key {key!r}")
    if "scenes" not in kwargs or "solvers" not in kwargs:
        raise InvalidArgumentError("config must set scenes and solvers")
    return SweepSpec(**kwargs)


def desk_preset(spec: SweepSpec) -> SweepSpec:
    """CI-budget variant: 32x32 only, 5 repeats; everything else unchanged."""
    return SweepSpec(
        scenes=spec.scenes, solvers=spec.solvers,
        sampling_ratios=spec.sampling_ratios, image_sizes=[(32, 32)],
        noise_levels=spec.noise_levels, repeats=5,
        base_seed=spec.base_seed, distribution=spec.distribution,
    )
