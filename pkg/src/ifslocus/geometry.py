"""Parameters, digit alphabets, canonical coordinates, and the affine branch maps.

For a complex parameter c with |c| > 1 the difference IFS acts through the
inverse branches g_t(z) = c*(z - t), with t drawn from the symmetric even
alphabet A_N (N = 2n - 1).  In the slanted/vertical coordinates

    s = (y*Re z + x*Im z) / |c|,      v = Im z          (c = x + iy)

a single inverse step is a shear plus a digit-controlled vertical
translation, which is the structure every search and pruning routine in
this package exploits.  Membership of c in the connectedness locus reduces
to whether the marked point 2c belongs to the difference attractor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

Word = tuple[int, ...]


class DegenerateParameterError(ValueError):
    """Parameter unusable for canonical-coordinate dynamics (real axis or |c| <= 1)."""


class DigitError(ValueError):
    """Digit outside the difference alphabet (odd, or out of range)."""


@dataclass(frozen=True)
class Family:
    """Map-count index n >= 2; the difference alphabet has N = 2n - 1 digits."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"family index must be an integer >= 2, got {self.n!r}")

    @property
    def N(self) -> int:
        return 2 * self.n - 1

    def coefficient_digits(self) -> list[int]:
        """D_n = {-n+1, ..., n-1}: allowed non-leading polynomial coefficients."""
        return list(range(-self.n + 1, self.n))

    def original_digits(self) -> list[int]:
        """A_n = {-n+1, -n+3, ..., n-1}: digits of the n-map collinear IFS."""
        return list(range(-self.n + 1, self.n, 2))

    def difference_digits(self) -> list[int]:
        """A_N = A_n - A_n = 2*D_n: even integers in [-(N-1), N-1]."""
        N = self.N
        return list(range(-N + 1, N, 2))


@dataclass(frozen=True)
class Parameter:
    """Complex IFS parameter c = x + iy with cached polar data and family index."""

    x: float
    y: float
    family: Family
    rho: float = field(init=False)
    theta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rho", math.hypot(self.x, self.y))
        object.__setattr__(self, "theta", math.atan2(self.y, self.x))

    @classmethod
    def from_complex(cls, c: complex, n: int) -> "Parameter":
        return cls(float(c.real), float(c.imag), Family(int(n)))

    @property
    def c(self) -> complex:
        return complex(self.x, self.y)

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def N(self) -> int:
        return self.family.N

    @property
    def marked_point(self) -> complex:
        """The point 2c whose backward orbit certifies membership."""
        return complex(2.0 * self.x, 2.0 * self.y)

    def conjugate(self) -> "Parameter":
        return Parameter(self.x, -self.y, self.family)

    def negated(self) -> "Parameter":
        return Parameter(-self.x, -self.y, self.family)

    def require_nonreal(self) -> "Parameter":
        if self.y == 0.0:
            raise DegenerateParameterError(
                "parameter on the real axis: canonical coordinates degenerate"
            )
        return self

    def require_dynamics(self) -> "Parameter":
        """Reject parameters for which the backward dynamics is unusable."""
        self.require_nonreal()
        if self.rho <= 1.0:
            raise DegenerateParameterError(
                f"|c| = {self.rho:.6g} <= 1: inverse branches do not expand"
            )
        return self


@dataclass(frozen=True)
class CanonicalCoords:
    """Slanted/vertical coordinates (s, v) of a point, relative to a parameter."""

    s: float
    v: float


class LensResult(NamedTuple):
    in_lens: bool
    margin: float


def lens_test(c: Parameter) -> LensResult:
    """Strict two-disk lens test: margin = N - rho^2 - 2|x|, inside iff margin > 0.

    The lens is where the canonical trap is a valid (self-covering) interior
    certificate region.  Real parameters are allowed here for reporting.
    """
    margin = float(c.N) - c.rho * c.rho - 2.0 * abs(c.x)
    return LensResult(margin > 0.0, margin)


def to_coords(z: complex, c: Parameter) -> CanonicalCoords:
    """Canonical coordinates s = (y*Re z + x*Im z)/rho, v = Im z."""
    c.require_nonreal()
    z = complex(z)
    return CanonicalCoords((c.y * z.real + c.x * z.imag) / c.rho, z.imag)


def to_point(coords: CanonicalCoords, c: Parameter) -> complex:
    """Inverse of ``to_coords``: recover z from (s, v)."""
    c.require_nonreal()
    u = (c.rho * coords.s - c.x * coords.v) / c.y
    return complex(u, coords.v)


def _check_digit(t: int, N: int) -> None:
    if t % 2 != 0:
        raise DigitError(f"digit {t} is odd; difference digits are even")
    if abs(t) > N - 1:
        raise DigitError(f"digit {t} outside [-{N - 1}, {N - 1}]")


def inverse_step(coords: CanonicalCoords, t: int, c: Parameter) -> CanonicalCoords:
    """One inverse branch z -> c*(z - t) in canonical coordinates.

    v' = rho*s - y*t and s' = (2x/rho)*v' - rho*v: the digit enters only
    through the vertical update.
    """
    c.require_nonreal()
    _check_digit(t, c.N)
    vp = c.rho * coords.s - c.y * t
    sp = (2.0 * c.x / c.rho) * vp - c.rho * coords.v
    return CanonicalCoords(sp, vp)


def nearest_digit(r: float, N: int) -> int:
    """Nearest difference digit to r, ties broken toward 0, clamped to +-(N-1).

    For |r| <= N the returned digit t satisfies |r - t| <= 1; beyond that the
    clamp makes the rule total (callers in this package only ever pass
    |r| <= N).
    """
    lo = 2 * math.floor(r / 2.0)
    hi = lo + 2
    d_lo = r - lo
    d_hi = hi - r
    if d_lo < d_hi:
        t = lo
    elif d_hi < d_lo:
        t = hi
    else:
        t = lo if abs(lo) < abs(hi) else hi
    return max(-(N - 1), min(N - 1, t))


def word_polynomial(word: Sequence[int], family: Family) -> list[int]:
    """Monic integer polynomial tracking the backward orbit of the marked point.

    The orbit endpoint after following ``word`` from 2c equals 2c * P(c).
    Coefficients are returned in descending degree; the recursion is
    P <- z*P - d with d = t/2 per digit, so non-leading coefficients stay in
    the restricted set D_n.
    """
    coeffs = [1]
    for t in word:
        _check_digit(t, family.N)
        coeffs.append(-(t // 2))
    return coeffs


def backward_word(z: complex, word: Sequence[int], c: Parameter) -> complex:
    """Apply the composed inverse branch along ``word`` (first digit first)."""
    w = complex(z)
    for t in word:
        w = c.c * (w - t)
    return w


def forward_word(z: complex, word: Sequence[int], c: Parameter) -> complex:
    """Apply the composed forward branch along ``word``; inverse of backward_word."""
    w = complex(z)
    for t in reversed(word):
        w = t + w / c.c
    return w
