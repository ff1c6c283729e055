import math

import numpy as np
import pytest

from ifslocus import (
    CanonicalCoords,
    DegenerateParameterError,
    DigitError,
    Family,
    Parameter,
    backward_word,
    inverse_step,
    lens_test,
    nearest_digit,
    to_coords,
    to_point,
    word_polynomial,
)
from ifslocus.roots import horner

from conftest import make_param


class TestFamily:
    def test_alphabets_n3(self):
        fam = Family(3)
        assert fam.N == 5
        assert fam.coefficient_digits() == [-2, -1, 0, 1, 2]
        assert fam.original_digits() == [-2, 0, 2]
        assert fam.difference_digits() == [-4, -2, 0, 2, 4]

    @pytest.mark.parametrize("n", [2, 3, 8, 20])
    def test_alphabet_identities(self, n):
        fam = Family(n)
        diff = fam.difference_digits()
        assert diff == [2 * d for d in fam.coefficient_digits()]
        assert len(diff) == fam.N
        assert 0 in diff
        assert diff == sorted(diff)

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            Family(1)


class TestParameter:
    def test_polar_cache(self):
        p = make_param(0.7 + 1.4j, 3)
        assert p.rho == pytest.approx(math.sqrt(2.45), rel=1e-14)
        assert p.rho**2 == pytest.approx(p.x**2 + p.y**2, rel=1e-14)
        assert p.theta == pytest.approx(math.atan2(1.4, 0.7))

    def test_dynamics_preconditions(self):
        with pytest.raises(DegenerateParameterError):
            make_param(1.5 + 0j, 3).require_dynamics()
        with pytest.raises(DegenerateParameterError):
            make_param(0.3 + 0.4j, 3).require_dynamics()


class TestLens:
    def test_interior_point(self):
        res = lens_test(make_param(0.7 + 1.4j, 3))
        assert res.in_lens
        assert res.margin == pytest.approx(5 - 2.45 - 1.4, abs=1e-12)

    def test_boundary_is_excluded(self):
        # |c+1| = sqrt(16) = 4 with x > 0 sits exactly on the n=8 lens edge
        res = lens_test(make_param(3.0 + 0.0j, 8))
        assert not res.in_lens
        assert res.margin == pytest.approx(0.0, abs=1e-12)

    def test_n20_sample(self):
        assert lens_test(make_param(5.1 + 1.0j, 20)).in_lens


class TestCoords:
    def test_real_point(self):
        c = make_param(0.7 + 1.4j, 3)
        coords = to_coords(1.0 + 0j, c)
        assert coords.v == 0.0
        assert coords.s == pytest.approx(c.y / c.rho, rel=1e-14)

    def test_marked_point(self):
        c = make_param(0.7 + 1.4j, 3)
        coords = to_coords(c.marked_point, c)
        assert coords.v == pytest.approx(2 * c.y, rel=1e-14)
        assert coords.s == pytest.approx(4 * c.x * c.y / c.rho, rel=1e-14)

    def test_origin(self):
        coords = to_coords(0j, make_param(0.7 + 1.4j, 3))
        assert (coords.s, coords.v) == (0.0, 0.0)

    def test_to_point_examples(self):
        c = make_param(0.7 + 1.4j, 3)
        assert to_point(CanonicalCoords(0.0, 0.0), c) == 0j
        assert to_point(CanonicalCoords(c.y / c.rho, 0.0), c) == pytest.approx(1.0 + 0j, abs=1e-12)
        z = 2 * c.c
        assert to_point(to_coords(z, c), c) == pytest.approx(z, rel=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            c = Parameter(rng.uniform(-3, 3), rng.uniform(0.1, 3), Family(3))
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            back = to_point(to_coords(z, c), c)
            assert abs(back - z) <= 1e-12 * (1 + abs(z))

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateParameterError):
            to_coords(1j, make_param(2.0 + 0j, 3))


class TestInverseStep:
    def test_origin_fixed_by_zero_digit(self):
        c = make_param(0.7 + 1.4j, 3)
        out = inverse_step(CanonicalCoords(0.0, 0.0), 0, c)
        assert (out.s, out.v) == (0.0, 0.0)

    def test_matches_complex_arithmetic(self):
        c = make_param(0.585 + 1.675j, 3)
        start = to_coords(c.marked_point, c)
        stepped = inverse_step(start, 2, c)
        direct = to_coords(c.c * (c.marked_point - 2), c)
        assert stepped.s == pytest.approx(direct.s, abs=1e-12)
        assert stepped.v == pytest.approx(direct.v, abs=1e-12)

    def test_vertical_annihilation(self):
        c = make_param(0.7 + 1.4j, 3)
        # choose s so that rho*s = y*t exactly
        t = 2
        s = c.y * t / c.rho
        out = inverse_step(CanonicalCoords(s, 0.3), t, c)
        assert out.v == pytest.approx(0.0, abs=1e-12)

    def test_commutation_random(self):
        rng = np.random.default_rng(5)
        c = make_param(1.1 + 1.2j, 3)
        digits = c.family.difference_digits()
        for _ in range(200):
            z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            t = int(rng.choice(digits))
            lhs = inverse_step(to_coords(z, c), t, c)
            rhs = to_coords(c.c * (z - t), c)
            assert abs(lhs.s - rhs.s) <= 1e-12 and abs(lhs.v - rhs.v) <= 1e-12

    def test_bad_digit(self):
        c = make_param(0.7 + 1.4j, 3)
        with pytest.raises(DigitError):
            inverse_step(CanonicalCoords(0.0, 0.0), 3, c)
        with pytest.raises(DigitError):
            inverse_step(CanonicalCoords(0.0, 0.0), 6, c)


class TestNearestDigit:
    @pytest.mark.parametrize(
        "r,N,expected",
        [
            (3.0, 5, 2),    # tie between 2 and 4 resolves toward 0
            (5.0, 5, 4),    # boundary of the digit range
            (0.9, 5, 0),
            (0.0, 5, 0),
            (-3.0, 5, -2),
            (7.3, 5, 4),    # clamp beyond the alphabet
            (-9.0, 7, -6),
        ],
    )
    def test_examples(self, r, N, expected):
        assert nearest_digit(r, N) == expected

    def test_against_exhaustive_search(self):
        rng = np.random.default_rng(23)
        for n in (2, 3, 8):
            N = 2 * n - 1
            alphabet = list(range(-N + 1, N, 2))
            for r in rng.uniform(-N, N, size=500):
                got = nearest_digit(float(r), N)
                best = min(abs(r - t) for t in alphabet)
                assert abs(r - got) == pytest.approx(best, abs=1e-12)
                # tie rule: no alphabet element at equal distance but smaller size
                for t in alphabet:
                    if abs(r - t) == abs(r - got):
                        assert abs(got) <= abs(t)

    def test_digit_window_bound(self):
        rng = np.random.default_rng(2)
        for n in (2, 3, 8):
            N = 2 * n - 1
            for r in rng.uniform(-N, N, size=300):
                assert abs(r - nearest_digit(float(r), N)) <= 1.0


class TestWordPolynomial:
    def test_single_digit(self):
        assert word_polynomial((2,), Family(3)) == [1, -1]

    def test_empty_word(self):
        assert word_polynomial((), Family(3)) == [1]

    def test_four_digit_example(self):
        assert word_polynomial((2, -4, -2, 4), Family(3)) == [1, -1, 2, 1, -2]

    def test_rejects_odd_digit(self):
        with pytest.raises(DigitError):
            word_polynomial((1,), Family(3))

    def test_orbit_identity_random(self):
        # backward orbit endpoint of the marked point equals 2c * P(c)
        rng = np.random.default_rng(7)
        fam = Family(3)
        digits = fam.difference_digits()
        for _ in range(200):
            rho = rng.uniform(1.05, 3.0)
            theta = rng.uniform(0.05, math.pi - 0.05)
            c = Parameter(rho * math.cos(theta), rho * math.sin(theta), fam)
            word = tuple(int(d) for d in rng.choice(digits, size=rng.integers(1, 11)))
            endpoint = backward_word(c.marked_point, word, c)
            poly = word_polynomial(word, fam)
            expected = c.marked_point * horner(poly, c.c)
            assert abs(endpoint - expected) <= 1e-10 * (1 + abs(expected))

    def test_coefficients_stay_restricted(self):
        rng = np.random.default_rng(13)
        fam = Family(4)
        digits = fam.difference_digits()
        for _ in range(50):
            word = tuple(int(d) for d in rng.choice(digits, size=6))
            coeffs = word_polynomial(word, fam)
            assert coeffs[0] == 1
            assert all(abs(a) <= fam.n - 1 for a in coeffs[1:])
