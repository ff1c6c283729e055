"""Level-by-level backward-orbit search with enclosure pruning and trap detection.

The classifier walks the backward tree of the marked point 2c breadth-first.
Children are generated per digit with a vertical pre-test against the
(inflated) enclosure, then a slanted test; a child falling strictly inside
the (deflated) trap short-circuits to an Interior verdict with its address
word as witness.  An empty level certifies Exterior.  The one-sided
inflation/deflation knob eta keeps both verdicts conservative under
floating point.

Each search is single-threaded and deterministic: digits are tried in
ascending order and the first trap hit wins.  Callers parallelize across
parameters, never within one search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._kernel import expand_level
from .boxes import canonical_trap, enclosure, trap_is_valid
from .geometry import Parameter, Word, to_coords

INTERIOR = "Interior"
EXTERIOR = "Exterior"
UNDETERMINED = "Undetermined"


class NodeCapError(RuntimeError):
    """Survival probe hit the node cap before reaching the requested depth."""


@dataclass(frozen=True)
class SearchConfig:
    """Caps and soundness knobs for the backward search."""

    k_max: int = 24
    L_max: int = 2_000_000
    tail_eps: float = 1e-12
    eta: float = 1e-9

    def __post_init__(self):
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")
        if self.L_max < 1:
            raise ValueError("L_max must be >= 1")
        if self.tail_eps <= 0.0:
            raise ValueError("tail_eps must be positive")
        if not 0.0 <= self.eta < 1e-3:
            raise ValueError("eta must lie in [0, 1e-3)")


@dataclass(frozen=True)
class SearchStats:
    nodes_expanded: int
    max_frontier: int
    per_level_counts: tuple[int, ...]


@dataclass(frozen=True)
class Node:
    """One backward-tree node: canonical coordinates plus its address word."""

    s: float
    v: float
    word: Word


@dataclass(frozen=True)
class Verdict:
    """Search outcome.

    Interior carries the capture depth and witness word; Exterior carries the
    extinction depth (0 when the marked point already lies outside the
    enclosure); Undetermined reports which cap stopped the search.
    """

    kind: str
    depth: int
    witness: Optional[Word]
    reason: Optional[str]
    stats: SearchStats


class SurvivalResult(NamedTuple):
    survives: bool
    frontier_size: int


class _Outcome(NamedTuple):
    kind: str
    depth: int
    witness: Optional[Word]
    reason: Optional[str]
    stats: SearchStats
    frontier_size: int
    frontier: Optional[tuple] = None  # (s, v, levels) when all levels completed


def _reconstruct(levels, idx, digit_values) -> Word:
    rev = []
    i = idx
    for parents, cols in reversed(levels):
        rev.append(int(digit_values[cols[i]]))
        i = int(parents[i])
    return tuple(reversed(rev))


def _run(c: Parameter, cfg: SearchConfig, trap_enabled: bool, max_depth: int) -> _Outcome:
    c.require_dynamics()
    enc = enclosure(c, cfg.tail_eps)
    grow = 1.0 + cfg.eta
    v_hat = enc.V_upper * grow
    s_hat = enc.S_upper * grow

    in_lens = trap_enabled and trap_is_valid(c)
    if in_lens:
        box = canonical_trap(c)
        shrink = 1.0 - cfg.eta
        s_trap = box.S * shrink
        v_trap = box.V * shrink
    else:
        s_trap = v_trap = -1.0

    root = to_coords(c.marked_point, c)
    per_level = [1]
    expanded = 0

    def stats() -> SearchStats:
        return SearchStats(expanded, max(per_level), tuple(per_level))

    if abs(root.s) > s_hat or abs(root.v) > v_hat:
        return _Outcome(EXTERIOR, 0, None, None, stats(), 0)
    if in_lens and abs(root.s) < s_trap and abs(root.v) < v_trap:
        return _Outcome(INTERIOR, 0, (), None, stats(), 1)

    rho = c.rho
    y = c.y
    shear = 2.0 * c.x / rho
    digit_values = np.asarray(c.family.difference_digits(), dtype=np.int64)
    digits_f = digit_values.astype(np.float64)
    ndig = digits_f.size

    s = np.array([root.s], dtype=np.float64)
    v = np.array([root.v], dtype=np.float64)
    levels: list[tuple[np.ndarray, np.ndarray]] = []

    for depth in range(1, max_depth + 1):
        buf = min(s.size * ndig, cfg.L_max)
        out_s = np.empty(buf, dtype=np.float64)
        out_v = np.empty(buf, dtype=np.float64)
        out_parent = np.empty(buf, dtype=np.int64)
        out_col = np.empty(buf, dtype=np.int16)
        m, hit_i, hit_j, code = expand_level(
            s, v, digits_f, rho, y, shear, v_hat, s_hat, in_lens,
            s_trap, v_trap, out_s, out_v, out_parent, out_col, cfg.L_max,
        )
        if code == 1:
            expanded += hit_i + 1
            word = _reconstruct(levels, hit_i, digit_values)
            word = word + (int(digit_values[hit_j]),)
            return _Outcome(INTERIOR, depth, word, None, stats(), m + 1)
        if code == 2:
            expanded += hit_i + 1
            return _Outcome(UNDETERMINED, depth, None, "node-cap", stats(), m)
        expanded += s.size
        if m == 0:
            return _Outcome(EXTERIOR, depth, None, None, stats(), 0)
        s = out_s[:m].copy()
        v = out_v[:m].copy()
        levels.append((out_parent[:m].copy(), out_col[:m].copy()))
        per_level.append(m)

    return _Outcome(UNDETERMINED, max_depth, None, "depth-cap", stats(), s.size, (s, v, levels))


def classify(c: Parameter, cfg: SearchConfig = SearchConfig()) -> Verdict:
    """Decide locus membership of c by backward search of the marked point.

    Interior implies c lies in the interior of the connectedness locus;
    Exterior implies c lies outside it; Undetermined reports which resource
    cap stopped the search.  Outside the lens the trap test is skipped and
    only enclosure extinction can conclude.
    """
    out = _run(c, cfg, trap_enabled=True, max_depth=cfg.k_max)
    return Verdict(out.kind, out.depth, out.witness, out.reason, out.stats)


def survival_depth(c: Parameter, k: int, cfg: SearchConfig = SearchConfig()) -> SurvivalResult:
    """Does some depth-k backward word of the marked point stay in the enclosure?

    Runs the pruned level search without the trap short-circuit.  Raises
    NodeCapError if the node cap fires before depth k, since survival is
    then genuinely undecided.
    """
    if k > cfg.k_max:
        raise ValueError(f"k = {k} exceeds cfg.k_max = {cfg.k_max}")
    out = _run(c, cfg, trap_enabled=False, max_depth=k)
    if out.kind == UNDETERMINED and out.reason == "node-cap":
        raise NodeCapError(f"node cap {cfg.L_max} reached at depth {out.depth}")
    if out.kind == EXTERIOR:
        return SurvivalResult(False, 0)
    return SurvivalResult(True, out.frontier_size)


def frontier_nodes(c: Parameter, k: int, cfg: SearchConfig = SearchConfig()) -> list[Node]:
    """The depth-k enclosure-admissible frontier as explicit nodes.

    Diagnostic companion to ``survival_depth``: every returned node carries
    its coordinates and full address word, in deterministic search order.
    Frontiers grow geometrically, so this is intended for small k.
    """
    if k > cfg.k_max:
        raise ValueError(f"k = {k} exceeds cfg.k_max = {cfg.k_max}")
    out = _run(c, cfg, trap_enabled=False, max_depth=k)
    if out.kind == UNDETERMINED and out.reason == "node-cap":
        raise NodeCapError(f"node cap {cfg.L_max} reached at depth {out.depth}")
    if out.frontier is None:
        return []
    s, v, levels = out.frontier
    digit_values = np.asarray(c.family.difference_digits(), dtype=np.int64)
    return [
        Node(float(s[i]), float(v[i]), _reconstruct(levels, i, digit_values))
        for i in range(s.size)
    ]


def digit_window(s: float, c: Parameter, v_bound: float) -> list[int]:
    """Vertically admissible digits at slanted coordinate s.

    Returns the contiguous block {t in A_N : |rho*s - y*t| <= v_bound} in
    ascending order; its size is at most floor(v_bound/|y|) + 1.
    """
    c.require_nonreal()
    if v_bound < 0.0:
        return []
    center = c.rho * s / c.y
    radius = v_bound / abs(c.y)
    t_min = 2 * math.ceil((center - radius) / 2.0)
    t_max = 2 * math.floor((center + radius) / 2.0)
    t_min = max(t_min, -(c.N - 1))
    t_max = min(t_max, c.N - 1)
    if t_min > t_max:
        return []
    return list(range(t_min, t_max + 1, 2))


def branching_cap(n: int) -> int:
    """Uniform per-node branching cap ceil(2(sqrt n + 1)/(sqrt n - 1)) for |c| >= sqrt n."""
    if n < 2:
        raise ValueError("family index must be >= 2")
    root = math.sqrt(n)
    return math.ceil(2.0 * (root + 1.0) / (root - 1.0))
