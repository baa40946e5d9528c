"""Command-line front end.

Exit codes: 0 success / decomposable, 1 not decomposable or failed
certificate, 2 ambiguous, 64 malformed input or usage, 65 input that is not
an isometry of the stated form.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from pathlib import Path

from .decomp import Verdict, decomposability
from .hermlin import (
    FormError,
    GeometryError,
    Location,
    ToleranceConfig,
    complex_to_json,
    form_from_json,
    locate,
    matrix_from_json,
    vector_from_json,
)
from .heisenberg import (
    HeisPoint,
    HorosphericalPoint,
    boundary_action,
    contact_form_eval,
    heis_mul,
    horospherical_coordinates,
    invariant_fan,
    standard_lift,
    vertical_projection,
)
from .invariants import (
    brehm_shape,
    cartan,
    cross_ratio,
    cross_ratio_reality,
    distance,
    swapping_reflection_exists,
    toledo_once_punctured_torus,
    triple_ratio,
)
from .isometry import (
    AmbiguousClassification,
    HoloIsometry,
    _jsonable,
    classify,
    conjugacy_invariant,
    goldman_f,
)
from .picard import SUPPORTED_D, certify_reflective

EXIT_OK, EXIT_NO, EXIT_AMBIGUOUS, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(_jsonable(obj), indent=2, sort_keys=True))


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _load_isometry(path: str, tol: ToleranceConfig) -> HoloIsometry:
    obj = _load_json(path)
    if not isinstance(obj, dict) or "lift" not in obj or "form" not in obj:
        raise UsageError(f"{path}: isometry JSON needs 'form' and 'lift'")
    try:
        M = matrix_from_json(obj["lift"])
        form = form_from_json(obj["form"])
    except (GeometryError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return HoloIsometry.of(M, form, tol)


def parse_complex(s: str) -> complex:
    """Parse '1', 'i', '-2.5i', '1+i', '3-4i' (j is accepted for i)."""
    t = s.strip().replace(" ", "").replace("j", "i")
    if not t:
        raise UsageError("empty complex number")
    t = re.sub(r"(^|[+-])i", r"\g<1>1i", t)
    try:
        return complex(t.replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"not a complex number: {s!r}") from exc


def parse_heis_point(s: str) -> HeisPoint:
    """'[z,t]' with z a complex literal, or a JSON object {"z": [re, im], "t": t}."""
    s = s.strip()
    if s.startswith("{"):
        try:
            return HeisPoint.from_json(json.loads(s))
        except (json.JSONDecodeError, GeometryError, TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    m = re.fullmatch(r"\[(.+),([^,]+)\]", s)
    if not m:
        raise UsageError(f"Heisenberg point must look like [z,t]: {s!r}")
    try:
        t = float(m.group(2))
    except ValueError as exc:
        raise UsageError(f"bad t in {s!r}") from exc
    return HeisPoint.of(parse_complex(m.group(1)), t)


def _tol(args) -> ToleranceConfig:
    try:
        return ToleranceConfig(args.tol_eq, args.tol_boundary, args.tol_angle)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    tol = _tol(args)
    A = _load_isometry(args.path, tol)
    try:
        cls = classify(A, tol)
    except AmbiguousClassification as exc:
        _emit({"tag": "ambiguous", "candidates": [c.value for c in exc.candidates], "detail": exc.detail, "f": goldman_f(A.trace)})
        return EXIT_AMBIGUOUS
    out = cls.to_json()
    out["f"] = goldman_f(A.trace)
    out["trace"] = A.trace
    if cls.tag.value != "identity":
        inv = conjugacy_invariant(A, tol)
        out["invariant"] = {
            "eigenvalues": inv.eigenvalues,
            "negative_type_index": inv.negative_type_index,
            "parabolic_data": inv.parabolic_data,
        }
    _emit(out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    tol = _tol(args)
    A = _load_isometry(args.path_a, tol)
    B = _load_isometry(args.path_b, tol)
    res = decomposability(A, B, tol)
    _emit(res.to_json())
    return {Verdict.DECOMPOSABLE: EXIT_OK, Verdict.NOT_DECOMPOSABLE: EXIT_NO, Verdict.AMBIGUOUS: EXIT_AMBIGUOUS}[res.verdict]


def cmd_invariants(args) -> int:
    tol = _tol(args)
    obj = _load_json(args.path)
    try:
        form = form_from_json(obj["form"])
        pts = [vector_from_json(p) for p in obj["points"]]
    except (KeyError, TypeError, GeometryError) as exc:
        raise UsageError(f"{args.path}: tuple JSON needs 'form' and 'points': {exc}") from exc
    if not 2 <= len(pts) <= 4:
        raise UsageError("invariants need 2, 3 or 4 points")
    locs = [locate(form, p, tol) for p in pts]
    out: dict = {"n": len(pts), "locations": [l.value for l in locs]}
    if any(l is Location.EXTERIOR for l in locs):
        raise FormError("points must lie in the closed ball")
    boundary = all(l is Location.BOUNDARY for l in locs)
    interior = all(l is Location.INTERIOR for l in locs)
    if len(pts) == 2 and interior:
        out["distance"] = distance(*pts, form)
    if len(pts) == 3:
        out["triple_ratio"] = triple_ratio(*pts, form)
        if boundary:
            out["cartan"] = cartan(*pts, form, tol)
        if interior:
            out["brehm_shape"] = brehm_shape(*pts, form, tol)
    if len(pts) == 4:
        out["cross_ratio"] = cross_ratio(*pts, form)
        rep = cross_ratio_reality(*pts, form, tol)
        out["reality"] = {
            "reality": rep.reality.value,
            "case": rep.case.value if rep.case else None,
            "coincident": rep.coincident,
        }
        out["swapping_reflection_exists"] = swapping_reflection_exists(*pts, form, tol)
        if boundary:
            out["toledo"] = toledo_once_punctured_torus(*pts, form, tol)
    _emit(out)
    return EXIT_OK


def cmd_heisenberg(args) -> int:
    op, rest = args.op, args.args

    def need(n):
        if len(rest) != n:
            raise UsageError(f"heisenberg {op} takes {n} argument(s)")

    if op == "mul":
        need(2)
        _emit(heis_mul(parse_heis_point(rest[0]), parse_heis_point(rest[1])).to_json())
    elif op == "inverse":
        need(1)
        _emit(parse_heis_point(rest[0]).inverse().to_json())
    elif op == "project":
        need(1)
        _emit({"z": complex_to_json(vertical_projection(parse_heis_point(rest[0])))})
    elif op == "lift":
        if len(rest) not in (1, 2):
            raise UsageError("heisenberg lift takes a point and an optional height u")
        p = parse_heis_point(rest[0])
        u = float(rest[1]) if len(rest) == 2 else 0.0
        _emit({"lift": standard_lift(HorosphericalPoint(p.z, float(p.t), u))})
    elif op == "coords":
        need(1)
        try:
            v = vector_from_json(json.loads(rest[0]))
        except (json.JSONDecodeError, GeometryError) as exc:
            raise UsageError(str(exc)) from exc
        h = horospherical_coordinates(v)
        _emit({"z": h.z, "t": h.t, "u": h.u})
    elif op == "contact":
        need(2)
        p = parse_heis_point(rest[0])
        try:
            tangent = [float(x) for x in json.loads(rest[1])]
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise UsageError("tangent must be a JSON list [dx, dy, dt]") from exc
        if len(tangent) != 3:
            raise UsageError("tangent must have three components")
        _emit({"value": contact_form_eval(p, tangent)})
    elif op == "act":
        need(2)
        g = _load_isometry(rest[0], _tol(args))
        _emit(boundary_action(g, parse_heis_point(rest[1])).to_json())
    elif op == "fan":
        need(1)
        _emit(invariant_fan(_load_isometry(rest[0], _tol(args)), _tol(args)).to_json())
    else:
        raise UsageError(f"unknown heisenberg operation {op!r}")
    return EXIT_OK


def cmd_picard_verify(args) -> int:
    if args.d not in SUPPORTED_D:
        raise UsageError(f"d = {args.d} is not supported; use one of {SUPPORTED_D}")
    cert = certify_reflective(args.d)
    _emit(cert.to_json())
    return EXIT_OK if cert.ok else EXIT_NO


def deltoid_samples(n: int) -> list[tuple[float, float, float, float]]:
    """n points of the null locus of f, one per ray at angles 2 pi k / n."""
    out = []
    for k in range(n):
        phi = 2 * math.pi * k / n
        u = complex(math.cos(phi), math.sin(phi))
        lo, hi = 0.0, 3.0
        if goldman_f(hi * u) <= 0:
            rho = hi
        else:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if goldman_f(mid * u) > 0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-15:
                    break
            rho = 0.5 * (lo + hi)
        z = rho * u
        out.append((phi, z.real, z.imag, goldman_f(z)))
    return out


def cmd_deltoid_sample(args) -> int:
    if args.n < 8:
        raise UsageError("--n must be at least 8")
    rows = deltoid_samples(args.n)
    if args.json:
        _emit([{"phi": p, "re": x, "im": y, "f_residual": r} for p, x, y, r in rows])
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["phi", "re", "im", "f_residual"])
        for row in rows:
            w.writerow([repr(v) for v in row])
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chyp", description="Complex hyperbolic plane toolkit")
    p.add_argument("--tol-eq", type=float, default=1e-9)
    p.add_argument("--tol-boundary", type=float, default=1e-8)
    p.add_argument("--tol-angle", type=float, default=1e-9)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="classify an isometry")
    s.add_argument("path")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("decompose", help="decide decomposability of a pair")
    s.add_argument("path_a")
    s.add_argument("path_b")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("invariants", help="invariants of 2 to 4 points")
    s.add_argument("path")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("heisenberg", help="Heisenberg group operations")
    s.add_argument("op", help="mul | inverse | project | lift | coords | contact | act | fan")
    s.add_argument("args", nargs="*")
    s.set_defaults(func=cmd_heisenberg)

    s = sub.add_parser("picard-verify", help="exact Picard certificate")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_picard_verify)

    s = sub.add_parser("deltoid-sample", help="samples of the null locus of f")
    s.add_argument("--n", type=int, default=64)
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", default=True)
    fmt.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_deltoid_sample)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chyp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormError as exc:
        print(f"chyp: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AmbiguousClassification as exc:
        print(f"chyp: ambiguous: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except GeometryError as exc:
        print(f"chyp: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
