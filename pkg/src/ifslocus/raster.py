"""Parameter-plane rasterization and attractor point clouds.

Raster output is a P5 PGM with a fixed code map (255 exterior, 254 masked,
128 undetermined, depth+1 for captured pixels) plus a JSON sidecar carrying
the scan spec and verdict counts, so repeated runs are byte-comparable
golden files.  Point clouds come from a seeded SplitMix64 digit stream and
are reproducible across platforms.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .boxes import enclosure
from .geometry import Parameter, to_coords
from .search import EXTERIOR, INTERIOR, SearchConfig, classify

CODE_EXTERIOR = 255
CODE_MASKED = 254
CODE_UNDETERMINED = 128
CODE_DEPTH_LIMIT = 121  # interior code is depth + 1, clamped here

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ScanSpec:
    """Rectangle, resolution, and search configuration for one raster scan.

    Pixel (i, j) maps to the center of its cell with row 0 at the top
    (im_max); pixels inside the closed unit disk or within skip_real_band
    of the real axis are masked.  skip_real_band defaults to one pixel
    height.
    """

    n: int
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    width: int
    height: int
    cfg: SearchConfig = field(default_factory=SearchConfig)
    skip_real_band: Optional[float] = None

    def __post_init__(self):
        if self.re_min >= self.re_max or self.im_min >= self.im_max:
            raise ValueError("bounds must satisfy re_min < re_max and im_min < im_max")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")

    @property
    def pixel_width(self) -> float:
        return (self.re_max - self.re_min) / self.width

    @property
    def pixel_height(self) -> float:
        return (self.im_max - self.im_min) / self.height

    @property
    def real_band(self) -> float:
        return self.pixel_height if self.skip_real_band is None else self.skip_real_band

    def pixel_center(self, i: int, j: int) -> complex:
        return complex(
            self.re_min + (i + 0.5) * self.pixel_width,
            self.im_max - (j + 0.5) * self.pixel_height,
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bounds": [self.re_min, self.re_max, self.im_min, self.im_max],
            "width": self.width,
            "height": self.height,
            "k_max": self.cfg.k_max,
            "L_max": self.cfg.L_max,
            "tail_eps": self.cfg.tail_eps,
            "eta": self.cfg.eta,
            "skip_real_band": self.real_band,
        }


@dataclass(frozen=True)
class RasterField:
    width: int
    height: int
    codes: bytes  # row-major, row 0 = top

    def code_at(self, i: int, j: int) -> int:
        return self.codes[j * self.width + i]

    def counts(self) -> dict:
        arr = np.frombuffer(self.codes, dtype=np.uint8)
        return {
            "interior": int(np.count_nonzero((arr >= 1) & (arr <= CODE_DEPTH_LIMIT))),
            "exterior": int(np.count_nonzero(arr == CODE_EXTERIOR)),
            "undetermined": int(np.count_nonzero(arr == CODE_UNDETERMINED)),
            "masked": int(np.count_nonzero(arr == CODE_MASKED)),
        }


def _pixel_code(spec: ScanSpec, c: complex) -> int:
    if abs(c) <= 1.0 or abs(c.imag) < spec.real_band:
        return CODE_MASKED
    try:
        verdict = classify(Parameter.from_complex(c, spec.n), spec.cfg)
    except Exception:
        return CODE_MASKED
    if verdict.kind == EXTERIOR:
        return CODE_EXTERIOR
    if verdict.kind == INTERIOR:
        return min(verdict.depth + 1, CODE_DEPTH_LIMIT)
    return CODE_UNDETERMINED


def _scan_rows(spec: ScanSpec, rows: list[int]) -> list[tuple[int, bytes]]:
    out = []
    for j in rows:
        line = bytearray(spec.width)
        for i in range(spec.width):
            line[i] = _pixel_code(spec, spec.pixel_center(i, j))
        out.append((j, bytes(line)))
    return out


def scan(spec: ScanSpec, threads: int = 1) -> RasterField:
    """Classify every pixel center of the spec rectangle.

    The output is identical for any thread count: rows are assembled by
    index, and each pixel's search is independent and deterministic.
    """
    rows: list[Optional[bytes]] = [None] * spec.height
    if threads <= 1:
        for j, line in _scan_rows(spec, list(range(spec.height))):
            rows[j] = line
    else:
        chunks = [list(range(j, spec.height, threads)) for j in range(threads)]
        chunks = [chunk for chunk in chunks if chunk]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_scan_rows, [spec] * len(chunks), chunks):
                for j, line in part:
                    rows[j] = line
    return RasterField(spec.width, spec.height, b"".join(rows))  # type: ignore[arg-type]


def write_pgm(path, field: RasterField) -> None:
    with open(path, "wb") as handle:
        handle.write(f"P5\n{field.width} {field.height}\n255\n".encode("ascii"))
        handle.write(field.codes)


def scan_metadata(spec: ScanSpec, field: RasterField, seed: Optional[int] = None) -> dict:
    return {
        "spec": spec.to_dict(),
        "seed": seed,
        "version": __version__,
        "counts": field.counts(),
    }


def write_metadata(path, metadata: dict) -> None:
    with open(path, "w") as handle:
        json.dump(metadata, handle, indent=2, sort_keys=True)
        handle.write("\n")


class SplitMix64:
    """Deterministic 64-bit generator; the digit stream is platform independent."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


@dataclass(frozen=True)
class CloudResult:
    points: tuple[complex, ...]
    truncation_error: float
    alphabet: str
    depth: int
    seed: int


def attractor_cloud(
    c: Parameter,
    alphabet: str = "difference",
    depth: int = 40,
    points: int = 2000,
    seed: int = 0,
) -> CloudResult:
    """Sample attractor points as truncated digit series sum a_k c^-k.

    Digits are drawn uniformly from the chosen alphabet via SplitMix64; the
    first point is the all-zero address (the origin) whenever 0 belongs to
    the alphabet.  The truncation error bound max|a| * rho^-depth / (1 - 1/rho)
    applies to every returned point.
    """
    c.require_dynamics()
    if depth < 1 or points < 1:
        raise ValueError("depth and points must be >= 1")
    if alphabet == "difference":
        digits = c.family.difference_digits()
    elif alphabet == "original":
        digits = c.family.original_digits()
    else:
        raise ValueError("alphabet must be 'difference' or 'original'")
    max_digit = max(abs(d) for d in digits)
    trunc = max_digit * c.rho ** (-depth) / (1.0 - 1.0 / c.rho)

    rng = SplitMix64(seed)
    inv = 1.0 / c.c
    out: list[complex] = []
    if 0 in digits:
        out.append(0j)
    while len(out) < points:
        z = 0j
        power = 1.0 + 0j
        for _ in range(depth):
            z += digits[rng.next() % len(digits)] * power
            power *= inv
        out.append(z)
    return CloudResult(tuple(out[:points]), trunc, alphabet, depth, seed)


def cloud_in_enclosure(cloud: CloudResult, c: Parameter, tail_eps: float = 1e-12) -> bool:
    """Every cloud point lies in the closed enclosure inflated by the truncation error."""
    enc = enclosure(c, tail_eps)
    slack = cloud.truncation_error * (1.0 + 1e-12) + 1e-12
    for z in cloud.points:
        coords = to_coords(z, c)
        if abs(coords.s) > enc.S_upper + slack or abs(coords.v) > enc.V_upper + slack:
            return False
    return True


def write_cloud_csv(path, cloud: CloudResult) -> None:
    with open(path, "w") as handle:
        handle.write("re,im\n")
        for z in cloud.points:
            handle.write(f"{z.real:.17g},{z.imag:.17g}\n")


def cloud_metadata(cloud: CloudResult, c: Parameter) -> dict:
    return {
        "spec": {
            "n": c.n,
            "c": [c.x, c.y],
            "alphabet": cloud.alphabet,
            "depth": cloud.depth,
            "points": len(cloud.points),
        },
        "seed": cloud.seed,
        "version": __version__,
        "truncation_error": cloud.truncation_error,
    }
