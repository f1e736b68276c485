"""Command-line front end: ``bergman expand|verify|curvature|scaling|oracle``."""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from typing import List, Optional

from . import __version__
from .errors import (BergmanError, InsufficientJetError, JetValidationError,
                     ParseError, ResourceError)
from .expansion import a_series
from .numeric import (ScalingConfig, default_exponents, run_scaling, write_csv)
from .oracle import MAX_TENSOR_POWER, cp1_model
from .polyring import (HalfPowerSeries, format_rational, hermitian_transpose,
                       poly_to_records, series_from_records, series_to_records)
from .potential import (PotentialJet, c2_closed_form, curvature_at_origin,
                        load_jet)
from .solver import (check_degree_bound, check_parity, solve_coefficients,
                     verify_reproducing)

EXIT_OK, EXIT_CHECK, EXIT_VALIDATION, EXIT_INSUFFICIENT, EXIT_RESOURCE = 0, 1, 2, 3, 4
REPORT_VERSION = "1.0"


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def jet_fingerprint(jet: PotentialJet) -> str:
    return hashlib.sha256(_canonical(jet.to_document()).encode()).hexdigest()


def read_jet(path) -> PotentialJet:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"jet file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from None
    return load_jet(doc)


def _hermitian(c: HalfPowerSeries) -> bool:
    return all(hermitian_transpose(p) == p for _, p in c.items())


def run_checks(jet: PotentialJet, N: int, L: int, c: HalfPowerSeries | None = None):
    """Run every validation; returns ``(checks, a, c)`` with ``checks`` a list of dicts."""
    a = a_series(jet, N)
    if c is None:
        c = solve_coefficients(a, N)
    checks = []

    def add(name, ok, detail=None):
        rec = {"check": name, "ok": bool(ok)}
        if detail is not None:
            rec["detail"] = detail
        checks.append(rec)

    add("a_parity", check_parity(a))
    add("a_degree_bound", check_degree_bound(a))
    add("c_parity", check_parity(c))
    add("c_degree_bound", check_degree_bound(c))
    add("hermitian", _hermitian(c))
    one = c[0].constant(c.dimension, 1)
    add("c0_is_one", c[0] == one)
    add("c1_is_zero", c.truncation_order < 1 or c[1].is_zero())
    report = verify_reproducing(c, a, N, L)
    detail = None
    if not report.ok:
        l, t = report.failure
        detail = {"l": list(l), "order": t, "residual": str(report.residual)}
    add("reproducing", report.ok, detail)
    if jet.max_degree >= 4 and N >= 2:
        if jet.has_pure_quartic():
            expected = c2_closed_form(curvature_at_origin(jet))
            add("c2_closed_form", c[2] == expected)
        else:
            checks.append({"check": "c2_closed_form", "ok": True,
                           "detail": "not applicable: quartic part is not of type (2,2)"})
    return checks, a, c


def build_report(jet: PotentialJet, N: int, c: HalfPowerSeries, checks) -> dict:
    flags = {name: all(ch["ok"] for ch in checks if ch["check"] in names)
             for name, names in {
                 "parity": ("a_parity", "c_parity"),
                 "degree_bound": ("a_degree_bound", "c_degree_bound"),
                 "hermitian": ("hermitian",),
                 "reproducing_verified": ("reproducing",),
             }.items()}
    return {
        "report_version": REPORT_VERSION,
        "jet_fingerprint": jet_fingerprint(jet),
        "dimension": jet.dimension,
        "order": N,
        "coefficients": series_to_records(c),
        "validation": flags,
    }


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# -- commands -----------------------------------------------------------------

def cmd_expand(args) -> int:
    jet = read_jet(args.jet)
    N = args.order
    checks, _, c = run_checks(jet, N, 2 * N + 2)
    report = build_report(jet, N, c, checks)
    ok = all(report["validation"].values())
    if not ok and not args.force:
        _emit({"status": "fail", "checks": checks})
        return EXIT_CHECK
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if ok else EXIT_CHECK


def _load_report(path, jet: PotentialJet, N: int) -> HalfPowerSeries:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"coefficient report not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}") from None
    if doc.get("report_version") != REPORT_VERSION:
        raise ParseError(f"unrecognized report_version {doc.get('report_version')!r}")
    order = doc.get("order")
    if not isinstance(order, int) or order < N:
        raise ParseError(f"report has order {order}, need {N}")
    c = series_from_records(jet.dimension, order, doc.get("coefficients", []))
    return c.truncate(N)


def cmd_verify(args) -> int:
    jet = read_jet(args.jet)
    N, L = args.order, args.max_degree
    c = None
    extra = []
    if args.coefficients:
        c = _load_report(args.coefficients, jet, N)
        with open(args.coefficients, encoding="utf-8") as fh:
            fp = json.load(fh).get("jet_fingerprint")
        extra.append({"check": "fingerprint", "ok": fp == jet_fingerprint(jet)})
    checks, _, _ = run_checks(jet, N, L, c)
    checks = extra + checks
    ok = all(ch["ok"] for ch in checks)
    out = {"status": "pass" if ok else "fail", "order": N, "max_degree": L,
           "checks": checks}
    failed = [ch for ch in checks if not ch["ok"]]
    if failed:
        out["first_failure"] = failed[0]
    _emit(out)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_curvature(args) -> int:
    jet = read_jet(args.jet)
    curv = curvature_at_origin(jet)

    def rec(idx, v):
        return {"index": list(idx), "re": format_rational(v.re), "im": format_rational(v.im)}

    riemann = [rec(idx, v) for idx, v in sorted(curv.riemann.items()) if v]
    ricci = [rec(idx, v) for idx, v in sorted(curv.ricci.items()) if v]
    _emit({
        "dimension": curv.dimension,
        "riemann": riemann,
        "ricci": ricci,
        "scalar": {"re": format_rational(curv.scalar.re),
                   "im": format_rational(curv.scalar.im)},
        "c2_closed_form": poly_to_records(c2_closed_form(curv)),
    })
    return EXIT_OK


def _default_samples(n: int):
    if n == 1:
        return ((0j,), (0.5 + 0j,), (0.6j,), (1 + 0j,))
    return ((0j, 0j), (0.5 + 0j, 0j), (0j, 0.6j), (0.6 + 0j, 0.6 + 0j))


def cmd_scaling(args) -> int:
    jet = read_jet(args.jet)
    N = args.order
    config = ScalingConfig.geometric(
        args.k_min, args.k_max, args.points, epsilon=args.epsilon, order=N,
        exponents=default_exponents(jet.dimension, 2),
        u_samples=_default_samples(jet.dimension))
    c = solve_coefficients(a_series(jet, N), N)
    summary = run_scaling(jet, c, config)
    write_csv(args.out, summary.rows)
    _emit({
        "slope": summary.slope,
        "threshold": summary.threshold,
        "floor_limited": summary.floor_limited,
        "passed": summary.passed,
        "per_k": [{"k": k, "max_residual": r} for k, r in summary.per_k()],
    })
    return EXIT_OK if summary.passed else EXIT_CHECK


def cmd_oracle(args) -> int:
    k, S = args.k, args.samples
    if k > MAX_TENSOR_POWER:
        raise ResourceError(f"tensor power {k} exceeds {MAX_TENSOR_POWER}")
    model = cp1_model(k)
    # deterministic spiral of sample points with |z| in [0, 3]
    pts = [3.0 * (i / max(S - 1, 1)) * complex(math.cos(2.4 * i), math.sin(2.4 * i))
           for i in range(S)]
    values = [float(model.bergman_function(z)) for z in pts]
    spread = max(values) / min(values) - 1
    rel = max(abs(v - (k + 1)) / (k + 1) for v in values)
    ok = spread <= 1e-8 and rel <= 1e-8
    _emit({"model": model.model, "k": k, "samples": S,
           "kernel_at_origin": complex(model.kernel(0, 0)).real,
           "bergman_min": min(values), "bergman_max": max(values),
           "max_relative_error_vs_k_plus_1": rel, "ratio_spread": spread,
           "passed": ok})
    return EXIT_OK if ok else EXIT_CHECK


# -- entry point --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_VALIDATION)


def _at_least(lo: int):
    def parse(text):
        val = int(text)
        if val < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return val
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bergman", description="Near-diagonal Bergman kernel expansion")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("expand", help="solve for the c-series and write a report")
    e.add_argument("--jet", required=True)
    e.add_argument("--order", type=_at_least(0), required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--force", action="store_true",
                   help="write the report even if a validation flag is false")
    e.set_defaults(func=cmd_expand)

    v = sub.add_parser("verify", help="run all exact checks")
    v.add_argument("--jet", required=True)
    v.add_argument("--order", type=_at_least(0), required=True)
    v.add_argument("--max-degree", type=_at_least(0), required=True)
    v.add_argument("--coefficients", help="check a stored report instead of re-solving")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curvature", help="curvature at the origin and the c_2 closed form")
    c.add_argument("--jet", required=True)
    c.set_defaults(func=cmd_curvature)

    s = sub.add_parser("scaling", help="residual scaling experiment")
    s.add_argument("--jet", required=True)
    s.add_argument("--order", type=_at_least(0), required=True)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--k-min", type=_at_least(4), required=True)
    s.add_argument("--k-max", type=_at_least(5), required=True)
    s.add_argument("--points", type=_at_least(4), default=7)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scaling)

    o = sub.add_parser("oracle", help="model kernels")
    osub = o.add_subparsers(dest="model", required=True, parser_class=_Parser)
    cp1 = osub.add_parser("cp1", help="Bergman function of O(k) on CP^1")
    cp1.add_argument("--k", type=_at_least(1), required=True)
    cp1.add_argument("--samples", type=_at_least(1), default=50)
    cp1.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        return args.func(args)
    except InsufficientJetError as exc:
        print(f"error: insufficient jet: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except ResourceError as exc:
        print(f"error: resource: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except JetValidationError as exc:
        term = getattr(exc, "term", None)
        where = f" (term {term})" if term is not None else ""
        print(f"error: invalid jet{where}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (BergmanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
