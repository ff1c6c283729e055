import dataclasses
import json
import math

import pytest

from ifslocus.certify import (
    BoundedValue,
    CertificateTuple,
    MalformedCertificateError,
    certificate_root,
    load_certificates,
    m20_sampling_check,
    parse_decimal,
    rouche_remainder,
    rouche_test,
    verify_certificate,
)
from ifslocus.search import SearchConfig


def sig3_tolerance(expected: float) -> float:
    # half a unit in the third significant digit
    return 0.5 * 10.0 ** (math.floor(math.log10(abs(expected))) - 2)


class TestBoundedValue:
    def test_parse_decimal_error(self):
        b = parse_decimal("0.877438833123")
        assert b.err == pytest.approx(0.5 * math.ulp(b.value))

    def test_arithmetic_tracks_bounds(self):
        a = BoundedValue(1.0, 1e-10)
        b = BoundedValue(2.0, 1e-10)
        total = a + b
        assert total.value == 3.0
        assert total.err >= 2e-10
        prod = a * b
        assert prod.value == 2.0
        assert prod.err >= 3e-10  # |a| err_b + |b| err_a


class TestRoucheRemainder:
    def test_linear_polynomial_is_zero(self):
        assert rouche_remainder([1, 0], 0.5 + 0.5j, 1.0).value == 0.0

    def test_square(self):
        out = rouche_remainder([1, 0, 0], 1.0 + 0j, 0.5)
        assert out.value == pytest.approx(0.25, rel=1e-12)

    def test_shifted_square(self):
        out = rouche_remainder([1, 0, -1], 1.05 + 0j, 0.1)
        assert out.value == pytest.approx(0.01, rel=1e-10)

    def test_monotone_in_radius(self):
        coeffs = [1, -2, 0, 2]
        z0 = 1.4 + 0.6j
        values = [rouche_remainder(coeffs, z0, r).value for r in (0.01, 0.05, 0.1, 0.5)]
        assert values == sorted(values)


class TestRoucheTest:
    def test_linear_passes(self):
        res = rouche_test([1, 0], 0j, 1.0)
        assert res.passes
        assert res.delta.value == pytest.approx(1.0, rel=1e-12)

    def test_double_root_fails(self):
        res = rouche_test([1, 0, 0], 1.0 + 0j, 0.5)
        assert not res.passes
        assert res.delta.value == pytest.approx(-0.25, rel=1e-12)

    def test_simple_root_passes(self):
        res = rouche_test([1, 0, -1], 1.05 + 0j, 0.1)
        assert res.passes
        assert res.delta.value == pytest.approx(0.0975, rel=1e-10)


@pytest.fixture(scope="module")
def certs():
    return load_certificates()


class TestCertificateTable:
    def test_row_count_and_range(self, certs):
        assert len(certs) == 18
        assert [c.n for c in certs] == list(range(2, 20))

    def test_all_rows_verify(self, certs):
        for cert in certs:
            check = verify_certificate(cert)
            assert check.all_ok, f"n={cert.n} failed {check}"

    def test_margins_match_printed_values(self, certs):
        for cert in certs:
            check = verify_certificate(cert)
            assert abs(check.rouche_margin.value - cert.expected_delta) <= sig3_tolerance(
                cert.expected_delta
            ), f"delta mismatch at n={cert.n}"
            assert abs(check.offlens_margin.value - cert.expected_lambda) <= sig3_tolerance(
                cert.expected_lambda
            ), f"lambda mismatch at n={cert.n}"

    def test_robust_to_doubled_bounds(self, certs):
        for cert in certs:
            check = verify_certificate(cert)
            assert check.rouche_margin.value - 2 * check.rouche_margin.err > 0
            assert check.offlens_margin.value - 2 * check.offlens_margin.err > 0

    def test_root_found_inside_disk(self, certs):
        for cert in certs:
            root = certificate_root(cert)
            assert abs(root - cert.center()) <= float(cert.radius)

    def test_certified_records(self, certs):
        from ifslocus.certify import certificate_record

        for cert in certs:
            record = certificate_record(cert)
            assert record.certified_radius == float(cert.radius)
            assert record.residual <= 1e-6  # degree-12 rows evaluate near 1e9

    def test_corrupted_radius_detected(self, certs):
        row17 = next(c for c in certs if c.n == 17)
        bad = dataclasses.replace(row17, radius="1e-5")
        check = verify_certificate(bad)
        assert not (check.rouche_ok and check.offlens_ok)

    def test_malformed_rows_rejected(self, tmp_path):
        with pytest.raises(MalformedCertificateError):
            CertificateTuple(2, (1, -3, 0, 1), "1.0", "1.0", "1e-3", 0.1, 0.1)
        with pytest.raises(MalformedCertificateError):
            CertificateTuple(2, (2, -1), "1.0", "1.0", "1e-3", 0.1, 0.1)
        broken = tmp_path / "bad.json"
        broken.write_text(json.dumps([{"n": 2}]))
        with pytest.raises(MalformedCertificateError):
            load_certificates(broken)

    def test_custom_file_load(self, tmp_path, certs):
        path = tmp_path / "table.json"
        path.write_text(
            json.dumps(
                [
                    {
                        "n": c.n,
                        "coeffs": list(c.coeffs),
                        "center_re": c.center_re,
                        "center_im": c.center_im,
                        "radius": c.radius,
                        "expected_delta": c.expected_delta,
                        "expected_lambda": c.expected_lambda,
                    }
                    for c in certs[:3]
                ]
            )
        )
        assert len(load_certificates(path)) == 3


class TestM20Sweep:
    def test_zero_interior(self):
        report = m20_sampling_check(grid=32, cfg=SearchConfig(k_max=16))
        assert report.ok
        assert report.samples > 50
        assert report.counts["Interior"] == 0

    def test_near_lens_spot_point(self):
        from ifslocus import Parameter, classify

        verdict = classify(Parameter.from_complex(5.3 + 0.3j, 20))
        assert verdict.kind != "Interior"

    def test_grid_guard(self):
        with pytest.raises(ValueError):
            m20_sampling_check(grid=8)
