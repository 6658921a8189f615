"""Persistence: PGM images, binary pattern/measurement bundles, result CSVs.

Bundle layout (little-endian): 8-byte magic "SPIBNDL1", kind byte
(1 = patterns, 2 = measurements), u32 m, u32 n, u64 seed, then for
measurement bundles one f64 sigma, followed by the float64 payload
(m*n values row-major for patterns, m values for measurements).
"""

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidArgumentError
from .model import Image, MeasurementSet, PatternSet

__all__ = [
    "BundleHeader",
    "read_image",
    "write_image",
    "read_bundle",
    "write_bundle",
    "write_patterns",
    "read_patterns",
    "write_measurements",
    "read_measurements",
    "write_results_csv",
    "read_results_csv",
]

MAGIC = b"SPIBNDL1"
_KIND_CODE = {"patterns": 1, "measurements": 2}
_KIND_NAME = {v: k for k, v in _KIND_CODE.items()}


# ------------------------------------------------------------------------ PGM


def _pgm_tokens(data: bytes):
    """Yield (token, byte_offset) for the ASCII header part, skipping comments."""
    i = 0
    while i < len(data):
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        else:
            start = i
            while i < len(data) and not data[i : i + 1].isspace():
                i += 1
            yield data[start:i], start, i


def read_image(path) -> Image:
    """Read a P2 (ASCII) or P5 (binary) PGM with maxval 255 into [0, 1]."""
    with open(path, "rb") as f:
        data = f.read()
    tokens = _pgm_tokens(data)

    def next_token(what):
        try:
            return next(tokens)
        except StopIteration:
            raise FormatError(f"truncated header: missing {what}", offset=len(data))

    magic, off, _ = next_token("magic")
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"not a PGM file (magic {magic!r})", offset=off)
    fields = []
    for what in ("width", "height", "maxval"):
        tok, off, end = next_token(what)
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"bad {what} {tok!r}", offset=off)
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError("non-positive dimensions", offset=off)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (must be 255)", offset=off)
    count = width * height

    if magic == b"P5":
        payload_start = end + 1  # single whitespace byte after maxval
        payload = data[payload_start : payload_start + count]
        if len(payload) < count:
            raise FormatError(
                f"truncated payload: expected {count} bytes, got {len(payload)}",
                offset=len(data),
            )
        values = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    else:
        values = np.empty(count)
        for idx in range(count):
            tok, off, end = next_token(f"pixel {idx}")
            try:
                v = int(tok)
            except ValueError:
                raise FormatError(f"bad pixel value {tok!r}", offset=off)
            if not 0 <= v <= 255:
                raise FormatError(f"pixel value {v} out of range", offset=off)
            values[idx] = v
    return Image(width=width, height=height, data=values / 255.0)


def write_image(img: Image, path, binary: bool = True) -> None:
    """Write as PGM with maxval 255; values are clipped to [0, 1] and rounded."""
    u8 = np.clip(np.rint(np.clip(img.data, 0.0, 1.0) * 255.0), 0, 255).astype(np.uint8)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n255\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        if binary:
            f.write(u8.tobytes())
        else:
            rows = u8.reshape(img.height, img.width)
            for row in rows:
                f.write((" ".join(str(v) for v in row) + "\n").encode("ascii"))


# -------------------------------------------------------------------- bundles


@dataclass
class BundleHeader:
    kind: str  # "patterns" | "measurements"
    m: int
    n: int
    seed: int
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODE:
            raise InvalidArgumentError(f"unknown bundle kind {self.kind!r}")

    @property
    def payload_count(self) -> int:
        return self.m * self.n if self.kind == "patterns" else self.m


def write_bundle(header: BundleHeader, payload: np.ndarray, path) -> None:
    payload = np.ascontiguousarray(payload, dtype="<f8").ravel()
    if payload.size != header.payload_count:
        raise InvalidArgumentError(
            f"payload has {payload.size} values, header declares {header.payload_count}"
        )
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<BIIQ", _KIND_CODE[header.kind], header.m, header.n,
                            header.seed & 0xFFFFFFFFFFFFFFFF))
        if header.kind == "measurements":
            f.write(struct.pack("<d", header.sigma))
        f.write(payload.tobytes())


def read_bundle(path):
    """Returns (BundleHeader, payload ndarray); bit-exact inverse of write."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != MAGIC:
        raise FormatError(f"bad magic {data[:8]!r}", offset=0)
    fixed = struct.calcsize("<BIIQ")
    if len(data) < 8 + fixed:
        raise FormatError("truncated header", offset=len(data))
    code, m, n, seed = struct.unpack_from("<BIIQ", data, 8)
    if code not in _KIND_NAME:
        raise FormatError(f"unknown kind byte {code}", offset=8)
    offset = 8 + fixed
    sigma = 0.0
    if _KIND_NAME[code] == "measurements":
        if len(data) < offset + 8:
            raise FormatError("truncated header (sigma)", offset=len(data))
        (sigma,) = struct.unpack_from("<d", data, offset)
        offset += 8
    header = BundleHeader(kind=_KIND_NAME[code], m=m, n=n, seed=seed, sigma=sigma)
    expected = header.payload_count * 8
    actual = len(data) - offset
    if actual != expected:
        raise FormatError(
            f"payload length mismatch: expected {expected} bytes, got {actual}",
            offset=offset,
        )
    payload = np.frombuffer(data, dtype="<f8", count=header.payload_count,
                            offset=offset).copy()
    return header, payload


def write_patterns(patterns: PatternSet, path) -> None:
    header = BundleHeader(kind="patterns", m=patterns.m, n=patterns.n,
                          seed=patterns.seed)
    write_bundle(header, patterns.rows, path)


def read_patterns(path) -> PatternSet:
    header, payload = read_bundle(path)
    if header.kind != "patterns":
        raise FormatError(f"expected a patterns bundle, got {header.kind}")
    rows = payload.reshape(header.m, header.n)
    return PatternSet(m=header.m, n=header.n, rows=rows,
                      intensities=rows.sum(axis=1), seed=header.seed)


def write_measurements(meas: MeasurementSet, n: int, path) -> None:
    header = BundleHeader(kind="measurements", m=meas.m, n=n,
                          seed=meas.noise_seed, sigma=meas.noise_sigma)
    write_bundle(header, meas.values, path)


def read_measurements(path):
    """Returns (MeasurementSet, n)."""
    header, payload = read_bundle(path)
    if header.kind != "measurements":
        raise FormatError(f"expected a measurements bundle, got {header.kind}")
    meas = MeasurementSet(values=payload, noise_sigma=header.sigma,
                          noise_seed=header.seed)
    return meas, header.n


# ------------------------------------------------------------------------ CSV

CSV_COLUMNS = [
    "scene", "solver", "ratio", "size", "noise_level", "repeat",
    "rmse", "iterations", "wall_time_s", "seed", "status",
]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def write_results_csv(rows, path) -> None:
    """One line per sweep row; failed cells leave rmse empty.

    ``rows`` is an iterable of objects exposing the CSV_COLUMNS fields
    (see bench.SweepRow).
    """
    rows = list(rows)
    if not rows:
        raise InvalidArgumentError("no rows to write")
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            rmse = "" if r.rmse is None else _fmt(r.rmse)
            w.writerow([
                r.scene, r.solver, _fmt(r.ratio), r.size, _fmt(r.noise_level),
                r.repeat, rmse, r.iterations, _fmt(r.wall_time_s), r.seed, r.status,
            ])


def read_results_csv(path):
    """Parse a results CSV back into a list of dicts (strings kept raw)."""
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_COLUMNS:
            raise FormatError(f"unexpected CSV header {reader.fieldnames}")
        return list(reader)
