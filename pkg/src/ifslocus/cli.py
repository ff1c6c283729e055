"""Command-line interface tying the library together.

Every run prints machine-readable JSON to stdout (pretty-printed with
--json) and obeys the exit-code contract: 0 success or all checks passed,
1 a verification check failed, 2 usage error, 3 internal error.  All
numeric options, including defaults, are echoed in the emitted metadata so
published runs can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__
from .capture import OffLensError, buffer_check, capture_time
from .certify import (
    MalformedCertificateError,
    certificate_record,
    load_certificates,
    m20_sampling_check,
    verify_certificate,
)
from .geometry import DegenerateParameterError, DigitError, Parameter
from .raster import (
    ScanSpec,
    attractor_cloud,
    cloud_metadata,
    scan,
    scan_metadata,
    write_cloud_csv,
    write_metadata,
    write_pgm,
)
from .roots import BudgetExceededError, roots_report, write_roots_csv
from .search import SearchConfig, classify

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(ValueError):
    pass


def _parse_complex(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise UsageError(f"--c expects 're,im', got {text!r}") from exc


def _parse_bounds(text: str) -> tuple[float, float, float, float]:
    try:
        a, b, lo, hi = (float(part) for part in text.split(","))
        return a, b, lo, hi
    except ValueError as exc:
        raise UsageError(f"--bounds expects 'remin,remax,immin,immax', got {text!r}") from exc


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w_s, h_s = text.lower().split("x")
        return int(w_s), int(h_s)
    except ValueError as exc:
        raise UsageError(f"--size expects 'WxH', got {text!r}") from exc


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        k_max=args.kmax, L_max=args.lmax, tail_eps=args.tail_eps, eta=args.eta
    )


def _config_echo(args, **extra) -> dict:
    echo = {
        "k_max": args.kmax,
        "L_max": args.lmax,
        "tail_eps": args.tail_eps,
        "eta": args.eta,
    }
    echo.update(extra)
    return echo


def _emit(payload: dict, pretty: bool) -> None:
    if pretty:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(json.dumps(payload, sort_keys=True))


def _param(args) -> Parameter:
    c = _parse_complex(args.c)
    p = Parameter.from_complex(c, args.n)
    try:
        p.require_dynamics()
    except DegenerateParameterError as exc:
        raise UsageError(str(exc)) from exc
    return p


def _cmd_classify(args) -> int:
    c = _param(args)
    verdict = classify(c, _search_config(args))
    _emit(
        {
            "command": "classify",
            "config": _config_echo(args, n=args.n, c=[c.x, c.y]),
            "kind": verdict.kind,
            "depth": verdict.depth,
            "witness": list(verdict.witness) if verdict.witness is not None else None,
            "reason": verdict.reason,
            "stats": asdict(verdict.stats),
            "version": __version__,
        },
        args.json,
    )
    return EXIT_OK


def _cmd_capture(args) -> int:
    c = _param(args)
    try:
        result = capture_time(c, _search_config(args))
    except OffLensError as exc:
        raise UsageError(str(exc)) from exc
    _emit(
        {
            "command": "capture",
            "config": _config_echo(args, n=args.n, c=[c.x, c.y]),
            "capture_time": result.capture_time,
            "witness": list(result.witness) if result.witness is not None else None,
            "captured_by_depth": list(result.captured_by_depth),
            "version": __version__,
        },
        args.json,
    )
    return EXIT_OK


def _cmd_scan(args) -> int:
    re_min, re_max, im_min, im_max = _parse_bounds(args.bounds)
    width, height = _parse_size(args.size)
    try:
        spec = ScanSpec(
            n=args.n,
            re_min=re_min,
            re_max=re_max,
            im_min=im_min,
            im_max=im_max,
            width=width,
            height=height,
            cfg=_search_config(args),
            skip_real_band=args.skip_real_band,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    field = scan(spec, threads=args.threads)
    metadata = scan_metadata(spec, field)
    if args.out:
        write_pgm(args.out, field)
        write_metadata(f"{args.out}.json", metadata)
    _emit({"command": "scan", "config": spec.to_dict(), **metadata}, args.json)
    return EXIT_OK


def _cmd_roots(args) -> int:
    try:
        rows = roots_report(
            args.n, args.degree, args.filter, _search_config(args), threads=args.threads
        )
    except BudgetExceededError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        write_roots_csv(args.out, rows)
    header = {
        "command": "roots",
        "config": _config_echo(args, n=args.n, degree=args.degree, filter=args.filter),
        "count": len(rows),
        "version": __version__,
    }
    if args.json:
        _emit({**header, "records": rows}, True)
    else:
        _emit(header, False)
        for row in rows:
            print(json.dumps(row, sort_keys=True))
    return EXIT_OK


def _cmd_certify(args) -> int:
    try:
        certs = load_certificates(args.cert_file)
    except (OSError, MalformedCertificateError) as exc:
        raise UsageError(f"cannot load certificates: {exc}") from exc
    rows = []
    all_ok = True
    for cert in certs:
        check = verify_certificate(cert)
        record = certificate_record(cert)
        seeded_ok = abs(record.root - cert.center()) <= float(cert.radius)
        ok = check.all_ok and seeded_ok
        all_ok = all_ok and ok
        rows.append(
            {
                "n": cert.n,
                "rouche_ok": check.rouche_ok,
                "offlens_ok": check.offlens_ok,
                "nonreal_ok": check.nonreal_ok,
                "root_in_disk": seeded_ok,
                "root": [record.root.real, record.root.imag],
                "certified_radius": record.certified_radius,
                "delta": check.rouche_margin.value,
                "delta_err": check.rouche_margin.err,
                "lambda": check.offlens_margin.value,
                "lambda_err": check.offlens_margin.err,
                "expected_delta": cert.expected_delta,
                "expected_lambda": cert.expected_lambda,
                "pass": ok,
            }
        )
    payload = {
        "command": "certify",
        "config": {"cert_file": args.cert_file or "bundled"},
        "passed": sum(1 for row in rows if row["pass"]),
        "total": len(rows),
        "rows": rows,
        "version": __version__,
    }
    _emit(payload, args.json)
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _cmd_attractor(args) -> int:
    c = _param(args)
    try:
        cloud = attractor_cloud(
            c, alphabet=args.alphabet, depth=args.depth, points=args.points, seed=args.seed
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    metadata = cloud_metadata(cloud, c)
    if args.out:
        write_cloud_csv(args.out, cloud)
        write_metadata(f"{args.out}.json", metadata)
    _emit({"command": "attractor", "config": _config_echo(args, n=args.n), **metadata}, args.json)
    return EXIT_OK


def _cmd_buffer_check(args) -> int:
    c = _param(args)
    try:
        report = buffer_check(c, samples=args.samples, cfg=_search_config(args))
    except OffLensError as exc:
        raise UsageError(str(exc)) from exc
    _emit(
        {
            "command": "buffer-check",
            "config": _config_echo(args, n=args.n, c=[c.x, c.y], samples=args.samples),
            "samples": report.samples,
            "max_steps": report.max_steps,
            "worst_margin": report.worst_margin,
            "failures": report.failures,
            "pass": report.ok,
            "version": __version__,
        },
        args.json,
    )
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def _cmd_m20_check(args) -> int:
    try:
        report = m20_sampling_check(grid=args.grid, cfg=_search_config(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(
        {
            "command": "m20-check",
            "config": _config_echo(args, grid=args.grid),
            "samples": report.samples,
            "counts": report.counts,
            "interior_points": [[z.real, z.imag] for z in report.interior_points],
            "pass": report.ok,
            "version": __version__,
        },
        args.json,
    )
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def _add_search_flags(parser) -> None:
    parser.add_argument("--kmax", type=int, default=24, help="max search depth")
    parser.add_argument("--lmax", type=int, default=2_000_000, help="max frontier nodes")
    parser.add_argument("--eta", type=float, default=1e-9, help="soundness inflation")
    parser.add_argument("--tail-eps", dest="tail_eps", type=float, default=1e-12,
                        help="enclosure series tail tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifslocus",
        description="Certified locus membership, capture depths, certificates, and rasters "
        "for collinear affine IFS parameters.",
    )
    parser.add_argument("--version", action="version", version=f"ifslocus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_c=True):
        p.add_argument("--n", type=int, required=True, help="family index n >= 2")
        if needs_c:
            p.add_argument("--c", type=str, required=True, help="parameter as 're,im'")
        _add_search_flags(p)
        p.add_argument("--json", action="store_true", help="pretty-print the JSON output")

    p = sub.add_parser("classify", help="decide locus membership of one parameter")
    common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("capture", help="capture time of the marked point (lens only)")
    common(p)
    p.set_defaults(func=_cmd_capture)

    p = sub.add_parser("scan", help="rasterize verdicts over a rectangle to PGM")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bounds", type=str, required=True, help="'remin,remax,immin,immax'")
    p.add_argument("--size", type=str, required=True, help="'WxH' pixels")
    p.add_argument("--out", type=str, default=None, help="output PGM path")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--skip-real-band", dest="skip_real_band", type=float, default=None)
    _add_search_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("roots", help="enumerate restricted-polynomial roots")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True, help="max degree")
    p.add_argument("--filter", choices=("all", "lens_nonreal", "offlens_nonreal"),
                   default="all")
    p.add_argument("--out", type=str, default=None, help="output CSV path")
    p.add_argument("--threads", type=int, default=1)
    _add_search_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("certify", help="verify off-lens witness certificates")
    p.add_argument("--cert-file", dest="cert_file", type=str, default=None,
                   help="JSON certificate table (bundled fixture by default)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("attractor", help="sample attractor points to CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=str, required=True)
    p.add_argument("--alphabet", choices=("difference", "original"), default="difference")
    p.add_argument("--depth", type=int, default=40)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    _add_search_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_attractor)

    p = sub.add_parser("buffer-check", help="two-step boundary re-capture check")
    common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=_cmd_buffer_check)

    p = sub.add_parser("m20-check", help="off-lens pocket sweep for n = 20")
    p.add_argument("--grid", type=int, default=64)
    _add_search_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_m20_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (DegenerateParameterError, DigitError, OffLensError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
