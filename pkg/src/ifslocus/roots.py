"""Restricted-coefficient polynomial enumeration and root finding.

Monic polynomials with non-leading coefficients in D_n = {-n+1, ..., n-1}
are the algebraic skeleton of the locus: their roots outside the unit disk
are exactly the parameters whose marked point lands on 0 after finitely
many backward steps.  The digit/coefficient dictionary is d = -t/2.
"""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Family, Parameter, Word, lens_test, word_polynomial
from .search import SearchConfig, classify

ENUMERATION_BUDGET = 10**8
FILTERS = ("all", "lens_nonreal", "offlens_nonreal")


class BudgetExceededError(ValueError):
    """Requested enumeration would exceed the polynomial-count budget."""


@dataclass(frozen=True)
class RestrictedPolynomial:
    """Monic integer polynomial with non-leading coefficients in D_n.

    Coefficients are stored in descending degree, leading coefficient 1.
    """

    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("degree must be >= 1")
        if self.coeffs[0] != 1:
            raise ValueError("polynomial must be monic")
        bound = self.n - 1
        for a in self.coeffs[1:]:
            if abs(a) > bound:
                raise ValueError(f"coefficient {a} outside [-{bound}, {bound}]")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        return horner(self.coeffs, z)


@dataclass(frozen=True)
class RootRecord:
    polynomial: RestrictedPolynomial
    root: complex
    residual: float
    certified_radius: Optional[float] = None


def horner(coeffs: Sequence[float], z: complex) -> complex:
    acc = 0j
    for a in coeffs:
        acc = acc * z + a
    return acc


def derivative(coeffs: Sequence[float]) -> list[float]:
    d = len(coeffs) - 1
    return [a * (d - i) for i, a in enumerate(coeffs[:-1])]


def newton_polish(coeffs: Sequence[float], z: complex, iters: int = 8) -> complex:
    deriv = derivative(coeffs)
    for _ in range(iters):
        dp = horner(deriv, z)
        if dp == 0:
            break
        step = horner(coeffs, z) / dp
        z = z - step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    return z


def aberth_roots(coeffs: Sequence[float], max_iter: int = 200, tol: float = 1e-14) -> list[complex]:
    """All complex roots by simultaneous Ehrlich-style iteration plus Newton polish.

    Initial guesses sit on the circle of radius 1 + max non-leading |coeff|
    with a fixed phase offset; multiple roots converge linearly but still
    reach small residuals since |P| is flat there.  Output is sorted by
    (real, imag) for reproducibility.
    """
    d = len(coeffs) - 1
    if d < 1:
        return []
    if d == 1:
        return [complex(-coeffs[1] / coeffs[0])]
    radius = 1.0 + max(abs(a) for a in coeffs[1:])
    angles = 2.0 * np.pi * (np.arange(d) + 0.25) / d
    z = radius * np.exp(1j * angles)
    poly = np.asarray(coeffs, dtype=np.complex128)
    dpoly = np.asarray(derivative(coeffs), dtype=np.complex128)
    for _ in range(max_iter):
        p = np.polyval(poly, z)
        dp = np.polyval(dpoly, z)
        dp = np.where(dp == 0, 1e-300, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        sums = (1.0 / diff).sum(axis=1)
        denom = 1.0 - w * sums
        denom = np.where(denom == 0, 1e-300, denom)
        corr = w / denom
        z = z - corr
        if np.all(np.abs(corr) <= tol * (1.0 + np.abs(z))):
            break
    out = [newton_polish(coeffs, complex(zi)) for zi in z]
    # collapse conjugate-pair rounding dust onto the real axis
    cleaned = []
    for zi in out:
        if abs(zi.imag) <= 1e-9 * (1.0 + abs(zi)):
            zi = complex(newton_polish(coeffs, complex(zi.real, 0.0)).real, 0.0)
        cleaned.append(zi)
    cleaned.sort(key=lambda w: (w.real, w.imag))
    return cleaned


# computed roots lying exactly on the unit circle carry noise up to ~1e-5
# when they are multiple (double roots float at ~sqrt(eps), triple at
# ~eps^(1/3)); genuine roots of small-height integer monic polynomials are
# never this close outside the disk (smallest Salem numbers exceed 1.17),
# so the margin separates the two regimes with orders of magnitude to spare
UNIT_CIRCLE_MARGIN = 1e-3


def outside_unit_disk(root: complex) -> bool:
    return abs(root) > 1.0 + UNIT_CIRCLE_MARGIN


def _passes_filter(root: complex, n: int, select: str) -> bool:
    if select == "all":
        return True
    if not outside_unit_disk(root) or root.imag == 0.0:
        return False
    in_lens = lens_test(Parameter.from_complex(root, n)).in_lens
    return in_lens if select == "lens_nonreal" else not in_lens


def enumerate_polynomials(n: int, max_degree: int) -> Iterable[RestrictedPolynomial]:
    """All monic D_n-polynomials of degree 1..max_degree in lexicographic order."""
    fam = Family(n)
    if (2 * n - 1) ** max_degree > ENUMERATION_BUDGET:
        raise BudgetExceededError(
            f"(2n-1)^max_degree = {(2 * n - 1) ** max_degree} exceeds {ENUMERATION_BUDGET}"
        )
    digits = fam.coefficient_digits()
    for degree in range(1, max_degree + 1):
        for tail in itertools.product(digits, repeat=degree):
            yield RestrictedPolynomial(n, (1, *tail))


def _solved_roots(poly: RestrictedPolynomial, select: str) -> Iterable[tuple[complex, float]]:
    scale = max(1.0, max(abs(a) for a in poly.coeffs))
    for root in aberth_roots(poly.coeffs):
        residual = abs(horner(poly.coeffs, root))
        if residual > 1e-12 * scale:
            # re-polish may move the root, so it must precede filtering
            root = newton_polish(poly.coeffs, root, iters=40)
            residual = abs(horner(poly.coeffs, root))
        if _passes_filter(root, poly.n, select):
            yield root, residual


def enumerate_roots(n: int, max_degree: int, select: str = "all") -> list[RootRecord]:
    """Roots of every restricted polynomial up to max_degree, filtered.

    Filters: "all", "lens_nonreal" (|c| > 1, non-real, inside the lens),
    "offlens_nonreal" (|c| > 1, non-real, outside).  Records keep their
    polynomial of provenance; roots are not deduplicated across polynomials.
    """
    if select not in FILTERS:
        raise ValueError(f"filter must be one of {FILTERS}, got {select!r}")
    return [
        RootRecord(poly, root, residual)
        for poly in enumerate_polynomials(n, max_degree)
        for root, residual in _solved_roots(poly, select)
    ]


def word_from_polynomial(p: RestrictedPolynomial) -> Word:
    """Digit word steering the marked point to 0 at the roots of p: t = -2d."""
    return tuple(-2 * d for d in p.coeffs[1:])


def polynomial_from_word(word: Word, n: int) -> RestrictedPolynomial:
    return RestrictedPolynomial(n, tuple(word_polynomial(word, Family(n))))


def _solve_block(n: int, polys: list[RestrictedPolynomial], select: str, cfg: SearchConfig) -> list[dict]:
    rows = []
    for poly in polys:
        for root, residual in _solved_roots(poly, select):
            if outside_unit_disk(root) and root.imag != 0.0:
                verdict = classify(Parameter.from_complex(root, n), cfg).kind
                in_lens = lens_test(Parameter.from_complex(root, n)).in_lens
            else:
                verdict = ""
                in_lens = False
            rows.append(
                {
                    "degree": poly.degree,
                    "coeffs": ";".join(str(a) for a in poly.coeffs),
                    "re": root.real,
                    "im": root.imag,
                    "residual": residual,
                    "in_lens": in_lens,
                    "verdict": verdict,
                }
            )
    return rows


def roots_report(
    n: int,
    max_degree: int,
    select: str = "all",
    cfg: SearchConfig = SearchConfig(),
    threads: int = 1,
) -> list[dict]:
    """CSV-shaped rows for every enumerated root, with search verdicts.

    Roots that the classifier cannot handle (real axis or |c| <= 1) get an
    empty verdict.  With threads > 1 the polynomial list is solved in
    contiguous blocks by a process pool; row order is identical for any
    worker count.
    """
    if select not in FILTERS:
        raise ValueError(f"filter must be one of {FILTERS}, got {select!r}")
    polys = list(enumerate_polynomials(n, max_degree))
    if threads <= 1 or len(polys) < 2 * threads:
        return _solve_block(n, polys, select, cfg)
    size = (len(polys) + threads - 1) // threads
    blocks = [polys[i:i + size] for i in range(0, len(polys), size)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_solve_block, repeat(n), blocks, repeat(select), repeat(cfg))
        return [row for part in parts for row in part]


def write_roots_csv(path, rows: Iterable[dict]) -> None:
    fields = ["degree", "coeffs", "re", "im", "residual", "in_lens", "verdict"]
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            out = dict(row)
            out["re"] = f"{row['re']:.17g}"
            out["im"] = f"{row['im']:.17g}"
            out["residual"] = f"{row['residual']:.3e}"
            writer.writerow(out)
