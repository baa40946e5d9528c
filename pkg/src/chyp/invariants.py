"""Projective invariants of point tuples in the closed complex hyperbolic plane.

All functions accept points either as :class:`ProjectivePoint` instances or
as raw 3-vectors, together with the Hermitian form they are written in.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .hermlin import (
    DEFAULT_TOL,
    GeometryError,
    HermitianForm,
    Location,
    ProjectivePoint,
    ToleranceConfig,
    as_vector,
    inner,
    locate,
    norm2,
    normalized_lift,
    polar_vector,
    unit,
)
from .isometry import AntiIsometry, HoloIsometry

REALITY_RTOL = 1e-8


def _vec(p) -> np.ndarray:
    return as_vector(p.representative if isinstance(p, ProjectivePoint) else p)


def _nonzero(z: complex, what: str, scale: float = 1.0) -> complex:
    if abs(z) <= 1e-14 * scale:
        raise GeometryError(f"degenerate configuration: {what} vanishes")
    return z


# ---------------------------------------------------------------------------
# triples


def triple_ratio(p1, p2, p3, form: HermitianForm) -> complex:
    """<P1,P2><P2,P3><P3,P1> / (<P1,P3><P3,P2><P2,P1>)."""
    P1, P2, P3 = (unit(_vec(p)) for p in (p1, p2, p3))
    num = inner(form, P1, P2) * inner(form, P2, P3) * inner(form, P3, P1)
    return num / _nonzero(num.conjugate(), "a pairwise Hermitian product")


def triple_product(p1, p2, p3, form: HermitianForm) -> complex:
    P1, P2, P3 = (_vec(p) for p in (p1, p2, p3))
    return inner(form, P1, P2) * inner(form, P2, P3) * inner(form, P3, P1)


def cartan(p1, p2, p3, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Cartan angular invariant arg(-<P1,P2><P2,P3><P3,P1>) in [-pi/2, pi/2]."""
    pts = [unit(_vec(p)) for p in (p1, p2, p3)]
    for P in pts:
        if locate(form, P, tol) is not Location.BOUNDARY:
            raise GeometryError("the Cartan invariant needs boundary points")
    prod = triple_product(*pts, form)
    _nonzero(prod, "a pairwise Hermitian product")
    a = cmath.phase(-prod)
    # round-off can push a complex-line triple past +-pi/2
    return max(-math.pi / 2, min(math.pi / 2, a))


def brehm_shape(p1, p2, p3, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Brehm's shape invariant -Re(T~), T~ the normalized triple product."""
    pts = []
    for p in (p1, p2, p3):
        P = _vec(p)
        if locate(form, P, tol) is not Location.INTERIOR:
            raise GeometryError("Brehm's invariant needs interior points")
        pts.append(normalized_lift(form, P))
    tt = triple_product(*pts, form) / (norm2(form, pts[0]) * norm2(form, pts[1]) * norm2(form, pts[2]))
    return -tt.real


def cosh2_half_distance(p, q, form: HermitianForm) -> float:
    """cosh^2(d(p,q)/2) = <P,Q><Q,P> / (<P,P><Q,Q>) for interior points."""
    P, Q = _vec(p), _vec(q)
    return abs(inner(form, P, Q)) ** 2 / (norm2(form, P) * norm2(form, Q))


def distance(p, q, form: HermitianForm) -> float:
    return 2 * math.acosh(math.sqrt(max(1.0, cosh2_half_distance(p, q, form))))


# ---------------------------------------------------------------------------
# cross-ratios


def cross_ratio(p1, p2, p3, p4, form: HermitianForm) -> complex:
    """<P3,P1><P4,P2> / (<P4,P1><P3,P2>)."""
    P1, P2, P3, P4 = (unit(_vec(p)) for p in (p1, p2, p3, p4))
    den = inner(form, P4, P1) * inner(form, P3, P2)
    _nonzero(den, "the denominator")
    return inner(form, P3, P1) * inner(form, P4, P2) / den


def _homog(z) -> tuple[complex, complex]:
    if z is None:
        return (1.0 + 0j, 0j)
    z = complex(z)
    if cmath.isinf(z):
        return (1.0 + 0j, 0j)
    return (z, 1.0 + 0j)


def _det(a, b) -> complex:
    return a[0] * b[1] - a[1] * b[0]


def classical_cross_ratio(z1, z2, z3, z4) -> complex:
    """[z1, z2; z3, z4] = (z4 - z1)(z3 - z2) / ((z4 - z2)(z3 - z1)).

    Points may be ``None`` or an infinite complex number for the point at
    infinity.  Homogeneous coordinates give the usual limit conventions;
    ``0/0`` raises and ``x/0`` returns complex infinity.
    """
    h = [_homog(z) for z in (z1, z2, z3, z4)]
    num = _det(h[3], h[0]) * _det(h[2], h[1])
    den = _det(h[3], h[1]) * _det(h[2], h[0])
    if den == 0:
        if num == 0:
            raise GeometryError("indeterminate cross-ratio")
        return complex(math.inf, 0)
    return num / den


def project_to_complex_line(p1, p2, x, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> ProjectivePoint:
    """Orthogonal projection onto the complex line through p1 and p2."""
    c = polar_vector(_vec(p1), _vec(p2), form, tol)
    X = _vec(x)
    Y = X - inner(form, X, c) * c
    return ProjectivePoint.of(Y, form, tol)


class Reality(Enum):
    POSITIVE_REAL = "positive_real"
    NEGATIVE_REAL = "negative_real"
    NON_REAL = "non_real"


class RealityCase(Enum):
    EQUIDISTANT_FROM_GEODESIC = "equidistant_from_geodesic"
    COCYCLIC_NON_SEPARATING = "cocyclic_non_separating"
    COCYCLIC_SEPARATING = "cocyclic_separating"


@dataclass(frozen=True)
class RealityReport:
    reality: Reality
    case: RealityCase | None
    value: complex
    coincident: bool = False


def _on_common_boundary_circle(pts, form: HermitianForm, tol: ToleranceConfig) -> bool:
    if any(locate(form, P, tol) is not Location.BOUNDARY for P in pts):
        return False
    c = polar_vector(pts[0], pts[1], form, tol)
    return all(abs(inner(form, unit(P), c)) <= 1e-7 for P in pts[2:])


def _has_coincidence(pts) -> bool:
    from .hermlin import projectively_equal

    return any(projectively_equal(pts[i], pts[j]) for i in range(4) for j in range(i + 1, 4))


def cross_ratio_reality(p1, p2, p3, p4, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> RealityReport:
    """Sign analysis of X(p1, p2, p3, p4) with the matching geometric case.

    Real positive values split into the "equidistant from a geodesic of
    L12" configuration and the cocyclic non-separating one; negative
    values only occur for separating cocyclic boundary points.
    """
    pts = [_vec(p) for p in (p1, p2, p3, p4)]
    X = cross_ratio(*pts, form)
    coinc = _has_coincidence(pts)
    if abs(X.imag) > REALITY_RTOL * (1 + abs(X)):
        return RealityReport(Reality.NON_REAL, None, X, coinc)
    cocyclic = _on_common_boundary_circle(pts, form, tol)
    if X.real < 0:
        return RealityReport(Reality.NEGATIVE_REAL, RealityCase.COCYCLIC_SEPARATING, X, coinc)
    case = RealityCase.COCYCLIC_NON_SEPARATING if cocyclic else RealityCase.EQUIDISTANT_FROM_GEODESIC
    return RealityReport(Reality.POSITIVE_REAL, case, X, coinc)


def swapping_reflection_exists(p1, p2, p3, p4, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether a real reflection exchanges p1 with p2 and p3 with p4.

    Boundary tuples: X real positive.  Interior tuples: additionally
    d(p1,p3) = d(p2,p4) and d(p1,p4) = d(p2,p3), compared via cosh^2(d/2).
    """
    pts = [_vec(p) for p in (p1, p2, p3, p4)]
    locs = {locate(form, P, tol) for P in pts}
    if locs == {Location.BOUNDARY}:
        interior = False
    elif locs == {Location.INTERIOR}:
        interior = True
    else:
        raise GeometryError("points must be all on the boundary or all interior")
    X = cross_ratio(*pts, form)
    if abs(X.imag) > REALITY_RTOL * (1 + abs(X)) or X.real <= 0:
        return False
    if not interior:
        return True
    c13 = cosh2_half_distance(pts[0], pts[2], form)
    c24 = cosh2_half_distance(pts[1], pts[3], form)
    c14 = cosh2_half_distance(pts[0], pts[3], form)
    c23 = cosh2_half_distance(pts[1], pts[2], form)
    return abs(c13 - c24) <= 1e-8 * max(c13, c24) and abs(c14 - c23) <= 1e-8 * max(c14, c23)


def toledo_once_punctured_torus(p1, p2, p3, p4, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """2 (A(p1,p2,p3) + A(p1,p3,p4)); bounded by 2 pi in absolute value."""
    return 2 * (cartan(p1, p2, p3, form, tol) + cartan(p1, p3, p4, form, tol))


# ---------------------------------------------------------------------------
# Brehm congruence by frame alignment


def _aligned_lifts(pts, form: HermitianForm) -> np.ndarray:
    """Lifts with <X,X> = -1 and <X2,X1>, <X3,X1> real positive."""
    X = [normalized_lift(form, P) for P in pts]
    for k in (1, 2):
        s = inner(form, X[k], X[0])
        if abs(s) > 0:
            X[k] = X[k] * (abs(s) / s)
    return np.column_stack(X)


def _augment(X: np.ndarray, form: HermitianForm) -> np.ndarray:
    """Replace the third column by a polar vector when the columns are dependent."""
    if np.linalg.matrix_rank(X, tol=1e-9 * np.linalg.norm(X)) == 3:
        return X
    c = polar_vector(X[:, 0], X[:, 1], form)
    return np.column_stack([X[:, 0], X[:, 1], c])


def brehm_congruence(xs, ys, form: HermitianForm, tol: float = 1e-8):
    """An isometry g with g(x_i) = y_i for interior triples, or None.

    Returns a :class:`HoloIsometry` when the triple ratios agree, an
    :class:`AntiIsometry` when they are conjugate, and ``None`` when the
    side lengths or triple ratios rule out congruence.
    """
    xs = [_vec(p) for p in xs]
    ys = [_vec(p) for p in ys]
    for i, j in ((0, 1), (1, 2), (0, 2)):
        a, b = cosh2_half_distance(xs[i], xs[j], form), cosh2_half_distance(ys[i], ys[j], form)
        if abs(a - b) > tol * max(a, b):
            return None
    Tx = triple_ratio(*xs, form)
    Ty = triple_ratio(*ys, form)
    X = _aligned_lifts(xs, form)
    if abs(Tx - Ty) <= 1e-7:
        Y = _aligned_lifts(ys, form)
        Xa, Ya = _augment(X, form), _augment(Y, form)
        if Xa is not X or Ya is not Y:
            Xa, Ya = _augment_pair(X, Y, form, holo=True)
        g = Ya @ np.linalg.inv(Xa)
        return HoloIsometry.of(g, form)
    if abs(Tx - Ty.conjugate()) <= 1e-7:
        # anti case: align the conjugate frame
        Y = _aligned_lifts(ys, form)
        Xa, Ya = _augment(X, form), _augment(Y, form)
        if Xa is not X or Ya is not Y:
            Xa, Ya = _augment_pair(X, Y, form, holo=False)
        M = Ya @ np.linalg.inv(np.conj(Xa))
        return AntiIsometry.of(M, form)
    return None


def _augment_pair(X, Y, form: HermitianForm, holo: bool):
    cx = polar_vector(X[:, 0], X[:, 1], form)
    cy = polar_vector(Y[:, 0], Y[:, 1], form)
    Xa = np.column_stack([X[:, 0], X[:, 1], cx])
    Ya = np.column_stack([Y[:, 0], Y[:, 1], cy])
    return Xa, Ya
