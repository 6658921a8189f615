"""Linear forward model for single-pixel acquisition.

A scene x (vectorized row-major) is probed by m modulation patterns, the
rows of a matrix A, giving scalar detector readings b = A x.  Gaussian
noise can be added to the readings afterwards.  All randomness goes
through numpy's PCG64 generator so a (seed, distribution, shape) triple
reproduces streams bit-identically on any platform.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "Image",
    "PatternSet",
    "MeasurementSet",
    "NoiseModel",
    "generate_patterns",
    "vectorize",
    "devectorize",
    "synthesize",
    "add_noise",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass
class Image:
    """2D grayscale scene; pixel values nominally in [0, 1].

    ``data`` is row-major (top-left origin), length ``width * height``.
    """

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidArgumentError("image dimensions must be positive")
        self.data = _readonly(np.asarray(self.data).ravel())
        if self.data.size != self.width * self.height:
            raise InvalidArgumentError(
                f"data length {self.data.size} != {self.width}x{self.height}"
            )

    def as_array(self) -> np.ndarray:
        """View as a (height, width) 2D array."""
        return self.data.reshape(self.height, self.width)

    @classmethod
    def from_array(cls, a: np.ndarray) -> "Image":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise InvalidArgumentError("expected a 2D array")
        return cls(width=a.shape[1], height=a.shape[0], data=a.ravel())


@dataclass
class PatternSet:
    """Modulation matrix A: m patterns of n pixels each, entries >= 0.

    ``intensities[i]`` caches the total light of pattern i (row sum).
    """

    m: int
    n: int
    rows: np.ndarray
    intensities: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.rows = _readonly(np.asarray(self.rows).reshape(self.m, self.n))
        self.intensities = _readonly(np.asarray(self.intensities).ravel())
        if self.intensities.size != self.m:
            raise InvalidArgumentError("intensities length must equal m")
        if not np.all(np.isfinite(self.rows)) or np.any(self.rows < 0):
            raise InvalidArgumentError("pattern entries must be finite and >= 0")

    @classmethod
    def from_matrix(cls, rows: np.ndarray, seed: int = 0) -> "PatternSet":
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise InvalidArgumentError("pattern matrix must be 2D")
        return cls(
            m=rows.shape[0],
            n=rows.shape[1],
            rows=rows,
            intensities=rows.sum(axis=1),
            seed=seed,
        )


@dataclass
class MeasurementSet:
    """Detector readings b, with noise provenance."""

    values: np.ndarray
    noise_sigma: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        self.values = _readonly(np.asarray(self.values).ravel())
        if not np.all(np.isfinite(self.values)):
            raise InvalidArgumentError("measurements must be finite")
        if self.noise_sigma < 0:
            raise InvalidArgumentError("noise_sigma must be >= 0")

    @property
    def m(self) -> int:
        return self.values.size


@dataclass
class NoiseModel:
    """Gaussian measurement noise, parameterized by a dimensionless level.

    The standard deviation is ``level * pixel_count``: the level is the
    ratio between sigma and the number of pixels.
    """

    level: float
    pixel_count: int
    sigma: float = field(init=False)

    def __post_init__(self):
        if self.level < 0:
            raise InvalidArgumentError("noise level must be >= 0")
        if self.pixel_count < 1:
            raise InvalidArgumentError("pixel_count must be >= 1")
        self.sigma = self.level * self.pixel_count


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate_patterns(
    m: int, width: int, height: int, distribution: str = "uniform01", seed: int = 0
) -> PatternSet:
    """Draw m random patterns of width*height pixels, i.i.d. per entry.

    distribution: "uniform01" (uniform on [0,1)) or "binary"
    (Bernoulli(0.5) over {0,1}).  Same arguments -> bit-identical output
    (PCG64 stream).
    """
    if m < 1:
        raise InvalidArgumentError("need at least one pattern")
    if width < 1 or height < 1:
        raise InvalidArgumentError("pattern dimensions must be positive")
    n = width * height
    rng = _rng(seed)
    if distribution == "uniform01":
        rows = rng.random((m, n))
    elif distribution == "binary":
        rows = rng.integers(0, 2, size=(m, n)).astype(np.float64)
    else:
        raise InvalidArgumentError(f"unknown distribution {distribution!r}")
    return PatternSet(m=m, n=n, rows=rows, intensities=rows.sum(axis=1), seed=seed)


def vectorize(img: Image) -> np.ndarray:
    """Row-major flattening of the scene."""
    return np.array(img.data, copy=True)


def devectorize(v: np.ndarray, width: int, height: int) -> Image:
    """Inverse of :func:`vectorize`; length must match width*height."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != width * height:
        raise InvalidArgumentError(
            f"vector length {v.size} != {width}x{height}"
        )
    return Image(width=width, height=height, data=v)


def synthesize(patterns: PatternSet, scene: Image) -> MeasurementSet:
    """Clean measurements b = A x for the given scene."""
    x = vectorize(scene)
    if patterns.n != x.size:
        raise InvalidArgumentError(
            f"pattern pixel count {patterns.n} != scene pixel count {x.size}"
        )
    return MeasurementSet(values=patterns.rows @ x, noise_sigma=0.0)


def add_noise(meas: MeasurementSet, noise: NoiseModel, seed: int = 0) -> MeasurementSet:
    """Add i.i.d. Normal(0, sigma^2) noise to each reading.

    The perturbation is ``sigma * g`` with g a standard-normal draw from
    the seeded generator, so for a fixed seed the noise scales linearly
    with sigma (useful for paired noise-level comparisons).
    """
    if noise.sigma == 0.0:
        return MeasurementSet(values=meas.values, noise_sigma=0.0, noise_seed=seed)
    g = _rng(seed).standard_normal(meas.m)
    return MeasurementSet(
        values=meas.values + noise.sigma * g,
        noise_sigma=noise.sigma,
        noise_seed=seed,
    )
