"""Canonical trap and enclosure boxes, their validity tests, and radial filters.

Both regions are axis-aligned boxes in the slanted/vertical coordinates.
The trap is an open box that is self-covering under the nearest-digit rule
exactly on the lens, so backward entry of the marked point certifies
interior membership.  The enclosure is the smallest closed box containing
the difference attractor; once every backward branch of the marked point
has left it, exterior membership is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import CanonicalCoords, Parameter, lens_test


class TruncationError(RuntimeError):
    """Enclosure series did not reach the requested tail bound within the term cap."""


@dataclass(frozen=True)
class Box:
    """Box |s| < S, |v| < V in canonical coordinates (<= when closed)."""

    S: float
    V: float
    closed: bool = False

    def contains(self, coords: CanonicalCoords) -> bool:
        if self.closed:
            return abs(coords.s) <= self.S and abs(coords.v) <= self.V
        return abs(coords.s) < self.S and abs(coords.v) < self.V

    def margin(self, coords: CanonicalCoords) -> float:
        """Smallest slack to the boundary; positive strictly inside."""
        return min(self.S - abs(coords.s), self.V - abs(coords.v))


@dataclass(frozen=True)
class EnclosureBounds:
    """Rigorous bracket of the enclosure half-widths after series truncation."""

    V_lower: float
    V_upper: float
    S_lower: float
    S_upper: float
    depth: int
    tail: float

    def upper_box(self) -> Box:
        return Box(self.S_upper, self.V_upper, closed=True)


def canonical_trap(c: Parameter) -> Box:
    """Open trap box with S = N|y|/rho and V = (N - 2|x|)|y|/rho^2.

    No validity check is performed; when 2|x| >= N the vertical half-width
    is clamped to 0 and the box is empty (membership always false), which
    lets the search run in enclosure-only mode outside the lens.
    """
    c.require_dynamics()
    ay = abs(c.y)
    S = c.N * ay / c.rho
    V = (c.N - 2.0 * abs(c.x)) * ay / (c.rho * c.rho)
    return Box(S, max(V, 0.0), closed=False)


def trap_is_valid(c: Parameter) -> bool:
    """True iff the trap is a nonempty self-covering box, i.e. rho^2 + 2|x| < N."""
    c.require_dynamics()
    valid = lens_test(c).in_lens
    if valid:
        # sharp validity implies the vertical margin V > |y|
        assert canonical_trap(c).V >= abs(c.y) * (1.0 - 1e-12)
    return valid


def enclosure(c: Parameter, tail_eps: float = 1e-12, max_terms: int = 10**6) -> EnclosureBounds:
    """Rigorous bracket of the smallest enclosing box of the difference attractor.

    The vertical half-width is (N-1) * sum_{k>=1} rho^-k |sin(k theta)|,
    summed until the geometric tail (N-1) rho^-K / (rho - 1) drops below
    tail_eps * max(1, partial sum).  The slanted half-width follows exactly
    as (N-1)|y|/rho + V/rho, applied to both bracket ends.
    """
    c.require_dynamics()
    if tail_eps <= 0.0:
        raise ValueError("tail_eps must be positive")
    amp = float(c.N - 1)
    rho = c.rho
    theta = c.theta
    partial = 0.0
    power = 1.0
    k = 0
    while True:
        k += 1
        power /= rho
        partial += amp * power * abs(math.sin(k * theta))
        tail = amp * power / (rho - 1.0)
        if tail <= tail_eps * max(1.0, partial):
            break
        if k >= max_terms:
            raise TruncationError(
                f"enclosure series for |c| = {rho:.6g} needs more than {max_terms} terms"
            )
    v_lo = partial
    v_hi = partial + tail
    base = amp * abs(c.y) / rho
    return EnclosureBounds(
        V_lower=v_lo,
        V_upper=v_hi,
        S_lower=base + v_lo / rho,
        S_upper=base + v_hi / rho,
        depth=k,
        tail=tail,
    )


def base_capture_closed_form(c: Parameter) -> bool:
    """Closed form for the marked point already lying in the open trap.

    For n >= 3 this is rho^2 + |x| < N/2; for n = 2 the slanted constraint
    |x| < 3/4 is not implied by the vertical one and must be imposed as well.
    """
    c.require_dynamics()
    vertical = c.rho * c.rho + abs(c.x) < c.N / 2.0
    if c.n >= 3:
        return vertical
    return vertical and abs(c.x) < 0.75


def disk_prefilter(c: Parameter) -> bool:
    """Radial pre-filter: non-real locus members satisfy |c| < 1 + sqrt(n-1).

    A False result certifies exterior; True says nothing by itself.
    """
    return c.rho < 1.0 + math.sqrt(c.n - 1)


def inner_annulus(c: Parameter) -> bool:
    """1 < |c| < sqrt(n) guarantees an interior parameter (no search needed)."""
    return 1.0 < c.rho < math.sqrt(c.n)
