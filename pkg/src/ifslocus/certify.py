"""Error-tracked Rouche disk test and off-lens witness certificate verification.

Error tracking is first-order ulp accounting, not interval arithmetic: every
primitive operation contributes |result| * 2^-52 to the absolute bound and
input bounds propagate through derivative-weighted sums.  Margins returned
by the public operations carry a global safety factor of 4 on the bound,
which comfortably covers the neglected second-order terms at the scales of
the shipped certificates (margins above 1e-7).

A certificate tuple (n, polynomial, center, radius, expected margins) is
accepted when three independent inequalities hold with room to spare under
the tracked bounds: the Rouche margin proves exactly one root of the
polynomial inside the disk, the off-lens margin places the whole disk
outside the lens, and the imaginary-part margin keeps it off the real axis.
Together they exhibit a non-real locus member outside the lens.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple, Sequence, Union

from .boxes import disk_prefilter
from .geometry import Parameter
from .roots import RestrictedPolynomial, RootRecord, horner, newton_polish
from .search import INTERIOR, SearchConfig, classify

EPS = 2.0**-52
SAFETY = 4.0

Scalar = Union[float, complex]


class MalformedCertificateError(ValueError):
    """Certificate row missing fields or violating the coefficient constraints."""


@dataclass(frozen=True)
class BoundedValue:
    """Value with an absolute error bound under the documented accounting."""

    value: Scalar
    err: float = 0.0

    def __add__(self, other: "BoundedValue | Scalar") -> "BoundedValue":
        other = _coerce(other)
        val = self.value + other.value
        return BoundedValue(val, self.err + other.err + abs(val) * EPS)

    def __sub__(self, other: "BoundedValue | Scalar") -> "BoundedValue":
        other = _coerce(other)
        val = self.value - other.value
        return BoundedValue(val, self.err + other.err + abs(val) * EPS)

    def __mul__(self, other: "BoundedValue | Scalar") -> "BoundedValue":
        other = _coerce(other)
        val = self.value * other.value
        err = abs(self.value) * other.err + abs(other.value) * self.err + abs(val) * EPS
        return BoundedValue(val, err)

    def magnitude(self) -> "BoundedValue":
        val = abs(self.value)
        return BoundedValue(val, self.err + val * EPS)

    def lower(self) -> float:
        return float(self.value.real if isinstance(self.value, complex) else self.value) - self.err

    def with_safety(self, factor: float = SAFETY) -> "BoundedValue":
        return BoundedValue(self.value, self.err * factor)


def _coerce(x: "BoundedValue | Scalar") -> BoundedValue:
    return x if isinstance(x, BoundedValue) else BoundedValue(x, 0.0)


def parse_decimal(text: str) -> BoundedValue:
    """Parse a printed decimal into the nearest double, charging 0.5 ulp at the source."""
    value = float(text)
    return BoundedValue(value, 0.5 * math.ulp(abs(value)) if value != 0.0 else 0.0)


@dataclass(frozen=True)
class CertificateTuple:
    """One table row: family index, monic restricted polynomial, decimal disk data."""

    n: int
    coeffs: tuple[int, ...]
    center_re: str
    center_im: str
    radius: str
    expected_delta: float
    expected_lambda: float

    def __post_init__(self):
        if len(self.coeffs) < 2 or self.coeffs[0] != 1:
            raise MalformedCertificateError("polynomial must be monic of degree >= 1")
        bound = self.n - 1
        if any(abs(a) > bound for a in self.coeffs[1:]):
            raise MalformedCertificateError(f"coefficients must lie in [-{bound}, {bound}]")
        if float(self.radius) <= 0.0:
            raise MalformedCertificateError("radius must be positive")

    def center(self) -> complex:
        return complex(float(self.center_re), float(self.center_im))


class RoucheResult(NamedTuple):
    passes: bool
    delta: BoundedValue


@dataclass(frozen=True)
class CertificateCheck:
    rouche_ok: bool
    offlens_ok: bool
    nonreal_ok: bool
    rouche_margin: BoundedValue
    offlens_margin: BoundedValue

    @property
    def all_ok(self) -> bool:
        return self.rouche_ok and self.offlens_ok and self.nonreal_ok


def _eval_tracked(coeffs: Sequence[int], z: BoundedValue) -> BoundedValue:
    acc = BoundedValue(complex(coeffs[0]), 0.0)
    for a in coeffs[1:]:
        acc = acc * z + complex(a)
    return acc


def _remainder_raw(coeffs: Sequence[int], z0: BoundedValue, r: BoundedValue) -> BoundedValue:
    d = len(coeffs) - 1
    m = z0.magnitude()
    outer = m + r
    total = BoundedValue(0.0, 0.0)
    m_pow = m * m
    outer_pow = outer * outer
    m_prev = m  # |z0|^(k-1)
    for k in range(2, d + 1):
        term = outer_pow - m_pow - (m_prev * r) * float(k)
        total = total + term * float(abs(coeffs[d - k]))
        if k < d:
            m_prev = m_pow
            m_pow = m_pow * m
            outer_pow = outer_pow * outer
    return total


def rouche_remainder(coeffs: Sequence[int], z0: Scalar, r: float) -> BoundedValue:
    """Second-order Taylor remainder bound R_P(z0, r) over the disk boundary.

    Sum over k >= 2 of |a_k| ((|z0|+r)^k - |z0|^k - k |z0|^(k-1) r), tracked
    with per-operation error accumulation; nondecreasing in r.
    """
    return _remainder_raw(coeffs, _coerce(z0), _coerce(float(r))).with_safety()


def rouche_test(coeffs: Sequence[int], z0: Scalar, r: float) -> RoucheResult:
    """Disk test |P(z0)| + R_P(z0, r) < |P'(z0)| r with tracked margins.

    A pass certifies exactly one zero of P in the closed disk around z0.
    Accepts plain scalars or BoundedValue inputs carrying source errors.
    """
    z0b = _coerce(z0)
    rb = _coerce(float(r) if not isinstance(r, BoundedValue) else r)
    d = len(coeffs) - 1
    deriv = [a * (d - i) for i, a in enumerate(coeffs[:-1])]
    p_here = _eval_tracked(coeffs, z0b).magnitude()
    dp_here = _eval_tracked(deriv, z0b).magnitude()
    delta = dp_here * rb - p_here - _remainder_raw(coeffs, z0b, rb)
    delta = delta.with_safety()
    return RoucheResult(delta.lower() > 0.0, delta)


def verify_certificate(cert: CertificateTuple) -> CertificateCheck:
    """Check one certificate row: unique root, off-lens disk, non-real disk.

    All three passing proves the disk holds exactly one polynomial root,
    that root is non-real with |c| > 1, it lies in the locus, and it lies
    outside the lens.
    """
    re_b = parse_decimal(cert.center_re)
    im_b = parse_decimal(cert.center_im)
    r_b = parse_decimal(cert.radius)
    z0 = BoundedValue(complex(re_b.value, im_b.value), re_b.err + im_b.err)

    rouche = rouche_test(cert.coeffs, z0, r_b)

    shifted = (z0 + 1.0).magnitude() - r_b
    lam = (shifted * shifted - float(2 * cert.n)).with_safety()
    offlens_ok = lam.lower() > 0.0

    im_margin = (im_b - r_b).with_safety()
    nonreal_ok = im_margin.lower() > 0.0

    return CertificateCheck(rouche.passes, offlens_ok, nonreal_ok, rouche.delta, lam)


def certificate_root(cert: CertificateTuple) -> complex:
    """Polished root of the certificate polynomial seeded at the printed center."""
    return newton_polish([float(a) for a in cert.coeffs], cert.center(), iters=60)


def certificate_record(cert: CertificateTuple) -> RootRecord:
    """Root record for the certified witness, radius attached when the disk test passes."""
    root = certificate_root(cert)
    radius = float(cert.radius) if rouche_test(cert.coeffs, root, float(cert.radius)).passes else None
    return RootRecord(
        RestrictedPolynomial(cert.n, cert.coeffs),
        root,
        abs(horner(cert.coeffs, root)),
        certified_radius=radius,
    )


def load_certificates(path=None) -> list[CertificateTuple]:
    """Load certificate tuples from a JSON file (bundled fixture by default)."""
    if path is None:
        text = resources.files("ifslocus.data").joinpath("off_lens_certificates.json").read_text()
    else:
        with open(path) as handle:
            text = handle.read()
    try:
        raw = json.loads(text)
        return [
            CertificateTuple(
                n=int(row["n"]),
                coeffs=tuple(int(a) for a in row["coeffs"]),
                center_re=str(row["center_re"]),
                center_im=str(row["center_im"]),
                radius=str(row["radius"]),
                expected_delta=float(row["expected_delta"]),
                expected_lambda=float(row["expected_lambda"]),
            )
            for row in raw
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedCertificateError(str(exc)) from exc


@dataclass(frozen=True)
class RegionSampleReport:
    """Outcome of sweeping the off-lens first-quadrant pocket for n = 20."""

    samples: int
    counts: dict
    interior_points: tuple[complex, ...]

    @property
    def ok(self) -> bool:
        return not self.interior_points


def m20_sampling_check(grid: int = 64, cfg: SearchConfig = SearchConfig()) -> RegionSampleReport:
    """Classify a lattice over {|c+1| >= sqrt(40), |c| < 1+sqrt(19), Im c > 0.05}.

    For n = 20 the non-real locus is confined to the lens, so no Interior
    verdict may occur in this pocket; any hit is reported as a falsification
    flag rather than raised.
    """
    if grid < 16:
        raise ValueError("grid must be >= 16")
    n = 20
    outer = 1.0 + math.sqrt(19.0)
    # tight bounding box of the crescent: x from the circle intersection to the
    # disk radius, y up to the height of the intersection point
    x_lo = (39.0 - outer * outer) / 2.0
    y_hi = math.sqrt(outer * outer - x_lo * x_lo)
    counts = {"Interior": 0, "Exterior": 0, "Undetermined": 0}
    hits = []
    tested = 0
    for i in range(grid):
        x = x_lo + (outer - x_lo) * i / (grid - 1)
        for j in range(grid):
            y = 0.05 + (y_hi - 0.05) * j / (grid - 1)
            if (x + 1.0) ** 2 + y * y < 40.0 or y <= 0.05:
                continue
            c = Parameter.from_complex(complex(x, y), n)
            if not disk_prefilter(c):
                continue
            verdict = classify(c, cfg)
            counts[verdict.kind] += 1
            tested += 1
            if verdict.kind == INTERIOR:
                hits.append(c.c)
    return RegionSampleReport(tested, counts, tuple(hits))
