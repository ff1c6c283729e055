"""Capture time of the marked point and the boundary re-capture checks.

The capture time is the least backward depth at which the marked point 2c
enters the open trap; the per-depth membership flags give the nested
finite-capture filtration.  The buffer check drives closed-trap boundary
points back inside with at most two nearest-digit steps, and the closure
probe tests the bounded-delay behaviour of capture times under parameter
limits on concrete sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .boxes import canonical_trap, trap_is_valid
from .geometry import CanonicalCoords, Parameter, Word, inverse_step, lens_test, nearest_digit
from .search import INTERIOR, SearchConfig, classify


class OffLensError(ValueError):
    """Capture time requested outside the lens, where the trap is not valid."""


@dataclass(frozen=True)
class CaptureResult:
    """Capture time (None when the search exhausted its caps without capture),
    the witness word, and per-depth capture flags for k = 0..k_max."""

    capture_time: Optional[int]
    witness: Optional[Word]
    captured_by_depth: tuple[bool, ...]


@dataclass(frozen=True)
class BufferReport:
    samples: int
    max_steps: int
    worst_margin: float
    failures: int

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.max_steps <= 2


@dataclass(frozen=True)
class ClosureProbeReport:
    ok: bool
    common_depth: Optional[int]
    limit_capture: Optional[int]
    witness: Optional[Word]
    reason: Optional[str]


def capture_time(c: Parameter, cfg: SearchConfig = SearchConfig()) -> CaptureResult:
    """Least backward depth at which the marked point enters the open trap.

    Breadth-first order makes the classifier's Interior depth exactly this
    minimum, so the search is shared.  Raises OffLensError outside the lens.
    """
    if not trap_is_valid(c):
        raise OffLensError(
            f"c = {c.c} has lens margin {lens_test(c).margin:.6g} <= 0; trap undefined"
        )
    verdict = classify(c, cfg)
    k = verdict.depth if verdict.kind == INTERIOR else None
    flags = tuple(k is not None and k <= j for j in range(cfg.k_max + 1))
    return CaptureResult(k, verdict.witness, flags)


def _recapture_steps(start: CanonicalCoords, c: Parameter, box) -> tuple[Optional[int], float]:
    cur = start
    for step in range(3):
        if box.contains(cur):
            return step, box.margin(cur)
        if step == 2:
            break
        t = nearest_digit(c.rho * cur.s / c.y, c.N)
        cur = inverse_step(cur, t, c)
    return None, box.margin(cur)


def buffer_check(c: Parameter, samples: int = 1000, cfg: SearchConfig = SearchConfig()) -> BufferReport:
    """Re-capture closed-trap boundary points by at most two nearest-digit steps.

    Samples the four edges |s| = S, |v| = V uniformly in coordinate space.
    Any point needing more than two steps is a failure and would falsify the
    two-step buffer property, flagging a soundness bug.
    """
    if not trap_is_valid(c):
        raise OffLensError(f"c = {c.c} is outside the lens")
    box = canonical_trap(c)
    per_edge = max(2, math.ceil(samples / 4))
    points: list[CanonicalCoords] = []
    for i in range(per_edge):
        frac = -1.0 + 2.0 * i / (per_edge - 1)
        points.append(CanonicalCoords(box.S * frac, box.V))
        points.append(CanonicalCoords(box.S * frac, -box.V))
        points.append(CanonicalCoords(box.S, box.V * frac))
        points.append(CanonicalCoords(-box.S, box.V * frac))

    max_steps = 0
    worst = math.inf
    failures = 0
    for pt in points:
        steps, margin = _recapture_steps(pt, c, box)
        worst = min(worst, margin)  # failures contribute their (negative) margin
        if steps is None:
            failures += 1
        else:
            max_steps = max(max_steps, steps)
    return BufferReport(len(points), max_steps, worst, failures)


def closure_delay_probe(
    c_seq: Sequence[Parameter],
    limit: Parameter,
    cfg: SearchConfig = SearchConfig(),
) -> ClosureProbeReport:
    """Sampled falsification harness for bounded-delay capture under limits.

    Verifies that every sequence member has finite capture time, takes the
    largest as the common depth k, and checks that the limit parameter is
    captured by depth k + 2.  Precondition violations are reported, not
    raised, since the probe is a diagnostic.
    """
    if not c_seq:
        return ClosureProbeReport(False, None, None, None, "empty sequence")
    depths = []
    for member in c_seq:
        try:
            res = capture_time(member, cfg)
        except (OffLensError, ValueError) as exc:
            return ClosureProbeReport(False, None, None, None, f"sequence member: {exc}")
        if res.capture_time is None:
            return ClosureProbeReport(False, None, None, None, f"{member.c} not captured")
        depths.append(res.capture_time)
    k = max(depths)
    try:
        limit_res = capture_time(limit, cfg)
    except (OffLensError, ValueError) as exc:
        return ClosureProbeReport(False, k, None, None, f"limit: {exc}")
    ok = limit_res.capture_time is not None and limit_res.capture_time <= k + 2
    reason = None if ok else f"limit capture {limit_res.capture_time} exceeds {k + 2}"
    return ClosureProbeReport(ok, k, limit_res.capture_time, limit_res.witness, reason)
