"""Decomposition of pairs of isometries into products of real reflections.

A pair (A, B) is decomposable when A = s1 s2 and B = s1 s3 for real
reflections s1, s2, s3.  The decision procedure is:

1. pairs with a common fixed point in the closed ball are settled by the
   interior and boundary common-fixed-point rules, with explicit witnesses;
2. otherwise a fixed point of [A, B] with real positive eigenvalue gives a
   four-cycle p1 -> p2 -> p3 -> p4 whose swapping reflection p1 <-> p3,
   p2 <-> p4 is the first witness;
3. negative or non-real eigenvalues are obstructions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .hermlin import (
    BALL,
    CUBE_ROOTS_OF_UNITY,
    DEFAULT_TOL,
    SIEGEL,
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
    projectively_equal,
    unit,
)
from .heisenberg import (
    HeisPoint,
    invariant_fan,
    pi_star,
    reflection_rcircle,
    translation_parameters,
)
from .invariants import cross_ratio, toledo_once_punctured_torus
from .isometry import (
    ELLIPTIC_TAGS,
    AmbiguousClassification,
    AntiIsometry,
    ClassTag,
    HoloIsometry,
    _jsonable,
    _orthonormal_complement_2d,
    _same_form,
    _space_points,
    anti_compose,
    ball_frame,
    classify,
    fixed_points_closure,
    heis_rotation,
    heis_translation_matrix,
    is_real_reflection,
    iso_eigensystem,
    projective_distance,
    pu_equal,
    siegel_frame,
)


class Verdict(Enum):
    DECOMPOSABLE = "decomposable"
    NOT_DECOMPOSABLE = "not_decomposable"
    AMBIGUOUS = "ambiguous"


class Rationale(Enum):
    MAIN_THEOREM = "main_theorem"
    COMMON_INTERIOR_FIXED = "common_interior_fixed"
    COMMON_BOUNDARY_FIXED = "common_boundary_fixed"
    COMPLEX_REFLECTION_RULE = "complex_reflection_rule"
    TRACE_OBSTRUCTION = "trace_obstruction"
    LAMBDA_NEGATIVE = "lambda_negative"


class DegenerateConfiguration(GeometryError):
    """Point configuration whose constraint system loses rank."""


EIG_REAL_RTOL = 1e-7
EIG_AMBIGUOUS_RTOL = 1e-4
WITNESS_TOL = 1e-8


@dataclass(frozen=True)
class DecompositionResult:
    verdict: Verdict
    witness: tuple[AntiIsometry, AntiIsometry, AntiIsometry] | None
    rationale: Rationale | None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "rationale": self.rationale.value if self.rationale else None,
            "detail": _jsonable(self.detail),
        }
        if self.witness is not None:
            out["witness"] = [s.to_json() for s in self.witness]
        return out


# ---------------------------------------------------------------------------
# commutators and four-cycles


def commutator(A: HoloIsometry, B: HoloIsometry) -> HoloIsometry:
    """A B A^-1 B^-1; independent of the chosen lifts."""
    _same_form(A.form, B.form)
    return A @ B @ A.inverse() @ B.inverse()


@dataclass(frozen=True, eq=False)
class FourCycle:
    """p1 -B^-1-> p2 -A^-1-> p3 -B-> p4 -A-> p1, with A P4 = lambda1 P1."""

    lifts: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    lambda1: complex
    form: HermitianForm
    degenerate: bool

    @property
    def points(self) -> tuple[ProjectivePoint, ...]:
        return tuple(ProjectivePoint.of(P, self.form) for P in self.lifts)


def four_cycle(A: HoloIsometry, B: HoloIsometry, fixed, tol: ToleranceConfig = DEFAULT_TOL) -> FourCycle:
    """The four-cycle attached to a fixed point of [A, B].

    ``fixed`` is a pair (point, eigenvalue) as returned by
    :func:`fixed_points_closure`.
    """
    point, lam = fixed
    P1 = unit(point.representative if isinstance(point, ProjectivePoint) else as_vector(point))
    C = commutator(A, B)
    if np.linalg.norm(C.lift @ P1 - lam * P1) > 1e-7 * max(1.0, np.linalg.norm(C.lift)):
        raise GeometryError("the given point is not fixed by [A, B] with that eigenvalue")
    P2 = B.inverse().lift @ P1
    P3 = A.inverse().lift @ P2
    P4 = B.lift @ P3
    lifts = (P1, P2, P3, P4)
    degenerate = any(
        projectively_equal(lifts[i], lifts[j], 1e-8) for i in range(4) for j in range(i + 1, 4)
    )
    return FourCycle(lifts, complex(lam), A.form, degenerate)


# ---------------------------------------------------------------------------
# swapping reflections


def _anti_from_frames(S: np.ndarray, D: np.ndarray, mu, form: HermitianForm) -> AntiIsometry | None:
    """The antiholomorphic map with M conj(S_i) = mu_i D_i, if it is an isometry."""
    try:
        Sinv = np.linalg.inv(np.conj(S))
    except np.linalg.LinAlgError:
        return None
    M = D @ np.diag(mu) @ Sinv
    try:
        return AntiIsometry.of(M, form)
    except GeometryError:
        return None


def _rank3(S: np.ndarray) -> bool:
    s = np.linalg.svd(S, compute_uv=False)
    return s[-1] > 1e-9 * s[0]


def _scalars(S: np.ndarray, D: np.ndarray, form: HermitianForm):
    """mu with mu_i conj(mu_j) = <S_j, S_i> / <D_i, D_j> for i < j."""

    def K(i, j):
        den = inner(form, D[:, i], D[:, j])
        if abs(den) < 1e-13:
            raise DegenerateConfiguration("orthogonal lifts in the swap constraints")
        return inner(form, S[:, j], S[:, i]) / den

    k12, k23, k13 = K(0, 1), K(1, 2), K(0, 2)
    m2sq = k12 * k23 / k13
    if abs(m2sq.imag) > 1e-7 * abs(m2sq) or m2sq.real <= 0:
        return None
    m2 = math.sqrt(m2sq.real)
    return np.array([k12 / m2, m2, k23.conjugate() / m2])


def construct_swapping_reflection(p1, p2, p3, p4, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> AntiIsometry | None:
    """A real reflection with p1 <-> p3 and p2 <-> p4, or None.

    Coincidences p1 = p3 and/or p2 = p4 are allowed (the corresponding
    points are then fixed).  Raises :class:`DegenerateConfiguration` when
    three or more points collapse and the constraints lose rank.
    """
    P = [normalized_lift(form, p.representative if isinstance(p, ProjectivePoint) else p) for p in (p1, p2, p3, p4)]
    P1, P2, P3, P4 = P
    eq13 = projectively_equal(P1, P3, 1e-8)
    eq24 = projectively_equal(P2, P4, 1e-8)
    if eq13 and (projectively_equal(P1, P2, 1e-8) or projectively_equal(P1, P4, 1e-8)):
        raise DegenerateConfiguration("three of the points coincide")
    if eq24 and (projectively_equal(P2, P1, 1e-8) or projectively_equal(P2, P3, 1e-8)):
        raise DegenerateConfiguration("three of the points coincide")

    if eq13 and eq24:
        c = polar_vector(P1, P2, form, tol)
        S = np.column_stack([P1, P2, c])
        k12 = inner(form, P2, P1) / inner(form, P1, P2)
        phi = _anti_from_frames(S, S, [k12, 1.0, 1.0], form)
    else:
        if eq13:
            S = np.column_stack([P1, P2, P4])
            D = np.column_stack([P1, P4, P2])
        elif eq24:
            S = np.column_stack([P1, P3, P2])
            D = np.column_stack([P3, P1, P2])
        else:
            S = np.column_stack([P1, P3, P2])
            D = np.column_stack([P3, P1, P4])
        if _rank3(S) and _rank3(D):
            mu = _scalars(S, D, form)
            phi = None if mu is None else _anti_from_frames(S, D, mu, form)
        else:
            phi = _swap_in_complex_line(P, eq13, form, tol)

    if phi is None or not is_real_reflection(phi, tol):
        return None
    pairs = ((P1, P3), (P3, P1), (P2, P4), (P4, P2))
    if not all(projectively_equal(phi.apply(X), Y, 1e-7) for X, Y in pairs):
        return None
    return phi


def _swap_in_complex_line(P, eq13: bool, form: HermitianForm, tol: ToleranceConfig) -> AntiIsometry | None:
    """Swapping reflection when all four points lie in one complex line."""
    P1, P2, P3, P4 = P
    if not eq13:
        X, Y, U, V = P1, P3, P2, P4
    else:
        X, Y, U, V = P2, P4, P1, P1
    c = polar_vector(X, Y, form, tol)
    for W in (U, V):
        if abs(inner(form, unit(W), c)) > 1e-7:
            raise DegenerateConfiguration("points span C^3 but the frame is singular")
    B = np.column_stack([X, Y])
    a, b = np.linalg.lstsq(B, U, rcond=None)[0]
    c1, c3 = np.linalg.lstsq(B, V, rcond=None)[0]
    if min(abs(a), abs(b), abs(c1), abs(c3)) < 1e-12:
        raise DegenerateConfiguration("a point coincides with a swapped point")
    # phi(U) = conj(a) mu1 Y + conj(b) mu2 X must be proportional to V = c1 X + c3 Y
    rho = (np.conj(b) * c3) / (np.conj(a) * c1)
    if abs(rho.imag) > 1e-7 * abs(rho) or rho.real <= 0:
        return None
    mu2 = 1 / math.sqrt(rho.real)
    mu1 = rho.real * mu2
    S = np.column_stack([X, Y, c])
    D = np.column_stack([Y, X, c])
    return _anti_from_frames(S, D, [mu1, mu2, 1.0], form)


def solve_common_reflection(A: HoloIsometry, B: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> AntiIsometry | None:
    """A real reflection s with s A s = A^-1 and s B s = B^-1, by linear algebra.

    The Souriau lift M satisfies M conj(A) = c A^-1 M and
    M conj(B) = c' B^-1 M for cube roots of unity c, c'.  For pairs without a
    common fixed point or stable line the solution space is at most one
    dimensional; this is used when the four-cycle degenerates.
    """
    I3 = np.eye(3)
    Ai, Bi = A.inverse().lift, B.inverse().lift
    # row-major vec: vec(M X) = (I kron X^T) vec(M), vec(Y M) = (Y kron I) vec(M)
    RA, LA = np.kron(I3, np.conj(A.lift).T), np.kron(Ai, I3)
    RB, LB = np.kron(I3, np.conj(B.lift).T), np.kron(Bi, I3)
    for c in CUBE_ROOTS_OF_UNITY:
        for d in CUBE_ROOTS_OF_UNITY:
            K = np.vstack([RA - c * LA, RB - d * LB])
            _, sv, vh = np.linalg.svd(K)
            null = [vh[i].conj() for i in range(9) if sv[i] <= 1e-9 * sv[0]]
            for v in null:
                try:
                    phi = AntiIsometry.of(v.reshape(3, 3), A.form)
                except GeometryError:
                    continue
                if is_real_reflection(phi, tol):
                    return phi
    return None


# ---------------------------------------------------------------------------
# single reflections vs single isometries


def reflection_decomposes(sigma: AntiIsometry, A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether A = sigma tau for a real reflection tau (tau = sigma A)."""
    _same_form(sigma.form, A.form)
    if not is_real_reflection(sigma, tol):
        raise GeometryError("sigma is not a real reflection")
    tau = AntiIsometry.of(sigma.souriau @ np.conj(A.lift), A.form)
    return is_real_reflection(tau, tol)


@dataclass(frozen=True)
class GeometricVerdict:
    decomposes: bool
    clause: str

    def __post_init__(self):
        object.__setattr__(self, "decomposes", bool(self.decomposes))

    def __bool__(self):
        return self.decomposes


def _preserves(sigma: AntiIsometry, v, tol: float = 1e-7) -> bool:
    return projectively_equal(sigma.apply(v), v, tol)


def _single_and_double(A: HoloIsometry):
    es = iso_eigensystem(A)
    single = next(c for c in es.clusters if c.multiplicity == 1)
    double = next(c for c in es.clusters if c.multiplicity == 2)
    return single, double


def geometric_decomposes(sigma: AntiIsometry, A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> GeometricVerdict:
    """Class-by-class geometric test of whether sigma decomposes A.

    e1  complex reflection: sigma preserves the fixed complex line.
    e2  complex reflection in a point: sigma fixes that point.
    e3  regular elliptic: sigma fixes the fixed point and preserves both
        stable complex lines through it.
    l   loxodromic: sigma exchanges the two fixed points.
    p   parabolic: sigma fixes the fixed point and preserves the stable
        complex line (screw), nothing more (2-step), or its infinite
        R-circle is orthogonal to the invariant fan (3-step).
    """
    _same_form(sigma.form, A.form)
    if not is_real_reflection(sigma, tol):
        raise GeometryError("sigma is not a real reflection")
    tag = classify(A, tol).tag
    if tag is ClassTag.IDENTITY:
        return GeometricVerdict(True, "identity")

    if tag is ClassTag.COMPLEX_REFLECTION:
        single, _ = _single_and_double(A)
        return GeometricVerdict(_preserves(sigma, single.vectors[:, 0]), "e1")
    if tag is ClassTag.COMPLEX_REFLECTION_IN_POINT:
        single, _ = _single_and_double(A)
        return GeometricVerdict(_preserves(sigma, single.vectors[:, 0]), "e2")
    if tag is ClassTag.REGULAR_ELLIPTIC:
        es = iso_eigensystem(A)
        ok = all(_preserves(sigma, c.vectors[:, 0]) for c in es.clusters)
        return GeometricVerdict(ok, "e3")
    if tag is ClassTag.LOXODROMIC:
        fps = fixed_points_closure(A, tol)
        P, Q = (fp.point.representative for fp in fps)
        return GeometricVerdict(projectively_equal(sigma.apply(P), Q, 1e-7), "l")

    p = fixed_points_closure(A, tol)[0].point.representative
    if not _preserves(sigma, p):
        return GeometricVerdict(False, "p")
    if tag is ClassTag.SCREW_PARABOLIC:
        single, _ = _single_and_double(A)
        return GeometricVerdict(_preserves(sigma, single.vectors[:, 0]), "p")
    if tag is ClassTag.UNIPOTENT_2STEP:
        return GeometricVerdict(True, "p")
    # 3-step: compare the R-circle of sigma with the invariant fan at q_inf
    G = siegel_frame(p, A.form)
    Ginv = np.linalg.inv(G)
    As = HoloIsometry.of(Ginv @ A.lift @ G, SIEGEL)
    sig_s = AntiIsometry.of(Ginv @ sigma.souriau @ np.conj(G), SIEGEL)
    F = invariant_fan(As, tol)
    L = reflection_rcircle(sig_s)
    ok = abs((complex(F.w).conjugate() * complex(L.direction)).real) <= 1e-7
    return GeometricVerdict(ok, "p")


# ---------------------------------------------------------------------------
# common fixed points


@dataclass(frozen=True)
class CommonFixedPoint:
    vector: np.ndarray
    location: Location


def common_fixed_points(A: HoloIsometry, B: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> list[CommonFixedPoint]:
    """Closure points fixed by both A and B, found by intersecting eigenspaces."""
    out = []
    ea, eb = iso_eigensystem(A), iso_eigensystem(B)
    for ca in ea.clusters:
        for cb in eb.clusters:
            Ua, Ub = ca.vectors, cb.vectors
            Mx = np.column_stack([Ua, -Ub])
            _, s, vh = np.linalg.svd(Mx)
            null = [vh[i].conj() for i in range(len(s)) if s[i] <= 1e-7] + [
                vh[i].conj() for i in range(len(s), vh.shape[0])
            ]
            if not null:
                continue
            V = np.column_stack([Ua @ n[: Ua.shape[1]] for n in null])
            # orthonormal basis of the intersection
            q, r = np.linalg.qr(V)
            rank = int(np.sum(np.abs(np.diag(r)) > 1e-9))
            V = q[:, :max(rank, 1)]
            cands = [V[:, 0]] if V.shape[1] == 1 else _space_points(A.form, V, tol)
            for v in cands:
                v = unit(v)
                loc = locate(A.form, v, tol)
                if loc is not Location.EXTERIOR:
                    out.append(CommonFixedPoint(v, loc))
    out.sort(key=lambda c: c.location is not Location.INTERIOR)
    return out


def _verify_witness(sigma: AntiIsometry, A: HoloIsometry, B: HoloIsometry, tol: ToleranceConfig):
    s2 = AntiIsometry.of(sigma.souriau @ np.conj(A.lift), A.form)
    s3 = AntiIsometry.of(sigma.souriau @ np.conj(B.lift), A.form)
    ok = (
        is_real_reflection(sigma, tol)
        and is_real_reflection(s2, tol)
        and is_real_reflection(s3, tol)
        and projective_distance(anti_compose(sigma, s2).lift, A.lift) <= WITNESS_TOL
        and projective_distance(anti_compose(sigma, s3).lift, B.lift) <= WITNESS_TOL
    )
    return (sigma, s2, s3) if ok else None


def _unitary_eigvecs_2d(U: np.ndarray):
    """Orthonormal eigenbasis of a 2x2 unitary matrix."""
    w, V = np.linalg.eig(U)
    v1 = V[:, 0] / np.linalg.norm(V[:, 0])
    v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
    return v1, v2


def _interior_witness(A: HoloIsometry, B: HoloIsometry, P: np.ndarray, tol: ToleranceConfig):
    """A real reflection through P decomposing both A and B."""
    form = A.form
    P = normalized_lift(form, P)
    Bs = _orthonormal_complement_2d(form, P)
    H = form.matrix
    a = Bs.conj().T @ H @ A.lift @ Bs
    b = Bs.conj().T @ H @ B.lift @ Bs
    v, vp = _unitary_eigvecs_2d(a)
    u, _ = _unitary_eigvecs_2d(b)
    x, y = u[0] * 1, None
    coeffs = np.array([v, vp]).conj() @ u
    x, y = coeffs
    phase = 0.0
    if abs(x) > 1e-9 and abs(y) > 1e-9:
        phase = cmath.phase(y) - cmath.phase(x)
    F = ball_frame(Bs @ v, Bs @ (cmath.exp(1j * phase) * vp), P, form)
    M = F @ np.linalg.inv(np.conj(F))
    return AntiIsometry.of(M, form)


def _exchange_reflection(P: np.ndarray, Q: np.ndarray, form: HermitianForm, tol: ToleranceConfig) -> AntiIsometry | None:
    """Real reflection swapping two boundary points and fixing their polar."""
    c = polar_vector(P, Q, form, tol)
    S = np.column_stack([P, Q, c])
    D = np.column_stack([Q, P, c])
    k = inner(form, Q, P) / inner(form, Q, P)
    return _anti_from_frames(S, D, [k, 1.0, 1.0], form)


def _reflection_at_infinity(a: complex, u: complex) -> np.ndarray:
    """Souriau lift of the reflection in the infinite R-circle through [a, 0] with direction u."""
    theta = cmath.phase(u)
    T = heis_translation_matrix(a, 0.0)
    R2 = heis_rotation(2 * theta).lift
    return T @ R2 @ np.conj(np.linalg.inv(T))


def _stable_vertical_line(M: np.ndarray, tag: ClassTag) -> complex | None:
    """Base point a of a stable vertical complex line, for non-3-step maps fixing q_inf."""
    if tag in (ClassTag.UNIPOTENT_2STEP, ClassTag.IDENTITY):
        return None
    rot, shift = pi_star(M)
    if abs(rot - 1) < 1e-9:
        return None
    return shift / (1 - rot)


def _boundary_witness(A: HoloIsometry, B: HoloIsometry, q: np.ndarray, tags, tol: ToleranceConfig):
    """Witness or verdict for pairs sharing the boundary fixed point q."""
    form = A.form
    ta, tb = tags
    commute = pu_equal(A.lift @ B.lift, B.lift @ A.lift, 1e-8)
    if ClassTag.LOXODROMIC in (ta, tb):
        if not commute:
            return None, False
        L = A if ta is ClassTag.LOXODROMIC else B
        P, Q = (fp.point.representative for fp in fixed_points_closure(L, tol))
        return _exchange_reflection(normalized_lift(form, P), normalized_lift(form, Q), form, tol), True
    if ta is ClassTag.UNIPOTENT_3STEP and tb is ClassTag.UNIPOTENT_3STEP and not commute:
        return None, False

    G = siegel_frame(q, form)
    Ginv = np.linalg.inv(G)
    As = HoloIsometry.of(Ginv @ A.lift @ G, SIEGEL)
    Bs = HoloIsometry.of(Ginv @ B.lift @ G, SIEGEL)
    if ta is ClassTag.UNIPOTENT_3STEP and tb is ClassTag.UNIPOTENT_3STEP:
        a, u = 0j, 1j * complex(invariant_fan(As, tol).w)
    else:
        X, Y, tx, ty = (As, Bs, ta, tb) if ta is not ClassTag.UNIPOTENT_3STEP else (Bs, As, tb, ta)
        a = _stable_vertical_line(X.lift, tx)
        if ty is ClassTag.UNIPOTENT_3STEP:
            u = 1j * complex(invariant_fan(Y, tol).w)
            a = 0j if a is None else a
        else:
            b = _stable_vertical_line(Y.lift, ty)
            if a is None:
                a = 0j if b is None else b
            if b is None or abs(b - a) < 1e-9:
                u = 1.0 + 0j
            else:
                u = (b - a) / abs(b - a)
    Ms = _reflection_at_infinity(a, u)
    return AntiIsometry.of(G @ Ms @ np.linalg.inv(np.conj(G)), form), True


# ---------------------------------------------------------------------------
# the decision procedure


def _eig_kind(lam: complex) -> str:
    r = abs(lam)
    if r == 0:
        return "ambiguous"
    rel = abs(lam.imag) / r
    if rel <= EIG_REAL_RTOL:
        if lam.real > EIG_REAL_RTOL * r:
            return "positive"
        return "negative"
    if rel <= EIG_AMBIGUOUS_RTOL:
        return "ambiguous"
    return "nonreal"


def _is_complex_reflection(tag: ClassTag) -> bool:
    return tag in (ClassTag.COMPLEX_REFLECTION, ClassTag.COMPLEX_REFLECTION_IN_POINT)


def decomposability(A: HoloIsometry, B: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> DecompositionResult:
    """Decide whether (A, B) is decomposable and build a witness when it is."""
    _same_form(A.form, B.form)
    form = A.form
    try:
        tags = (classify(A, tol).tag, classify(B, tol).tag)
    except AmbiguousClassification as exc:
        return DecompositionResult(Verdict.AMBIGUOUS, None, None, {"reason": str(exc)})

    if ClassTag.IDENTITY in tags:
        other = B if tags[0] is ClassTag.IDENTITY else A
        sigma = _single_reflection(other, tol)
        w = _verify_witness(sigma, A, B, tol) if sigma is not None else None
        if w is not None:
            return DecompositionResult(Verdict.DECOMPOSABLE, w, Rationale.COMMON_INTERIOR_FIXED, {"identity": True})

    common = common_fixed_points(A, B, tol)
    if common:
        cp = common[0]
        if cp.location is Location.INTERIOR:
            sigma = _interior_witness(A, B, cp.vector, tol)
            w = _verify_witness(sigma, A, B, tol)
            if w is None:
                return DecompositionResult(Verdict.AMBIGUOUS, None, Rationale.COMMON_INTERIOR_FIXED, {"reason": "witness verification failed"})
            return DecompositionResult(Verdict.DECOMPOSABLE, w, Rationale.COMMON_INTERIOR_FIXED)
        sigma, ok = _boundary_witness(A, B, cp.vector, tags, tol)
        if not ok:
            return DecompositionResult(Verdict.NOT_DECOMPOSABLE, None, Rationale.COMMON_BOUNDARY_FIXED, {"commute": False})
        w = _verify_witness(sigma, A, B, tol) if sigma is not None else None
        if w is None:
            return DecompositionResult(Verdict.AMBIGUOUS, None, Rationale.COMMON_BOUNDARY_FIXED, {"reason": "witness verification failed"})
        return DecompositionResult(Verdict.DECOMPOSABLE, w, Rationale.COMMON_BOUNDARY_FIXED)

    try:
        C = commutator(A, B)
    except GeometryError as exc:
        return DecompositionResult(Verdict.AMBIGUOUS, None, None, {"reason": f"commutator lost precision: {exc}"})
    detail = {"commutator_trace": C.trace}
    try:
        fps = fixed_points_closure(C, tol)
    except AmbiguousClassification as exc:
        return DecompositionResult(Verdict.AMBIGUOUS, None, None, {**detail, "reason": str(exc)})
    except GeometryError as exc:
        return DecompositionResult(Verdict.AMBIGUOUS, None, None, {**detail, "reason": str(exc)})
    kinds = [(_eig_kind(fp.eigenvalue), fp) for fp in fps]
    detail["eigenvalues"] = [fp.eigenvalue for fp in fps]
    rationale = Rationale.COMPLEX_REFLECTION_RULE if any(map(_is_complex_reflection, tags)) else Rationale.MAIN_THEOREM
    for kind, fp in kinds:
        if kind != "positive":
            continue
        try:
            cyc = four_cycle(A, B, fp, tol)
            phi = construct_swapping_reflection(*cyc.lifts, form, tol)
        except DegenerateConfiguration:
            phi = None
        except GeometryError:
            cyc, phi = None, None
        if phi is None and cyc is not None and cyc.degenerate:
            phi = solve_common_reflection(A, B, tol)
        w = _verify_witness(phi, A, B, tol) if phi is not None else None
        if w is not None:
            return DecompositionResult(Verdict.DECOMPOSABLE, w, rationale, detail)
        return DecompositionResult(Verdict.AMBIGUOUS, None, rationale, {**detail, "reason": "witness verification failed"})
    if any(k == "ambiguous" for k, _ in kinds):
        return DecompositionResult(Verdict.AMBIGUOUS, None, None, detail)
    if any(k == "negative" for k, _ in kinds):
        return DecompositionResult(Verdict.NOT_DECOMPOSABLE, None, Rationale.LAMBDA_NEGATIVE, detail)
    return DecompositionResult(Verdict.NOT_DECOMPOSABLE, None, Rationale.TRACE_OBSTRUCTION, detail)


def _single_reflection(A: HoloIsometry, tol: ToleranceConfig) -> AntiIsometry | None:
    """Some real reflection decomposing A (A paired with the identity)."""
    tag = classify(A, tol).tag
    if tag is ClassTag.IDENTITY:
        return AntiIsometry.standard(A.form)
    fps = fixed_points_closure(A, tol)
    interior = [fp for fp in fps if fp.point.location is Location.INTERIOR]
    if interior:
        return _interior_witness(A, A, interior[0].point.representative, tol)
    sigma, ok = _boundary_witness(A, A, fps[0].point.representative, (tag, tag), tol)
    return sigma if ok else None


# ---------------------------------------------------------------------------
# maximal representations


@dataclass(frozen=True)
class MaximalReport:
    fixed_point: ProjectivePoint
    eigenvalue: complex
    stable_line_polar: np.ndarray
    both_loxodromic: bool
    toledo: float

    def to_json(self) -> dict:
        return _jsonable(
            {
                "fixed_point": self.fixed_point.representative,
                "location": self.fixed_point.location.value,
                "eigenvalue": self.eigenvalue,
                "stable_line_polar": self.stable_line_polar,
                "both_loxodromic": self.both_loxodromic,
                "toledo": self.toledo,
            }
        )


def _common_polar(A: HoloIsometry, B: HoloIsometry) -> np.ndarray | None:
    for ca in iso_eigensystem(A).clusters:
        v = unit(ca.vectors[:, 0])
        if norm2(A.form, v) <= 1e-8:
            continue
        Bv = B.lift @ v
        if projectively_equal(Bv, v, 1e-7):
            return v / math.sqrt(norm2(A.form, v))
    return None


def maximal_rep_analysis(A: HoloIsometry, B: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> MaximalReport | None:
    """Report on a pair whose commutator has a negative real closure eigenvalue."""
    _same_form(A.form, B.form)
    C = commutator(A, B)
    try:
        fps = fixed_points_closure(C, tol)
    except GeometryError:
        return None
    neg = [fp for fp in fps if _eig_kind(fp.eigenvalue) == "negative"]
    if not neg:
        return None
    fp = neg[0]
    cyc = four_cycle(A, B, fp, tol)
    polar = _common_polar(A, B)
    if polar is None:
        raise GeometryError("no common stable complex line found")
    tags = (classify(A, tol).tag, classify(B, tol).tag)
    tau = toledo_once_punctured_torus(*cyc.lifts, A.form, tol)
    return MaximalReport(
        fp.point,
        fp.eigenvalue,
        polar,
        all(t is ClassTag.LOXODROMIC for t in tags),
        tau,
    )


def cfuchsian_pair(s1: float = 4.0, s2: float = 4.0) -> tuple[HoloIsometry, HoloIsometry]:
    """Two hyperbolics of the first-axis complex line of the ball.

    SU(1,1) translations of lengths s1, s2 along the real and imaginary
    diameters, embedded as [[a, 0, b], [0, 1, 0], [c, 0, d]].  For lengths
    above about 3.53 the commutator is hyperbolic with trace below -2.
    """

    def embed(m):
        M = np.eye(3, dtype=complex)
        M[0, 0], M[0, 2], M[2, 0], M[2, 2] = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
        return HoloIsometry.of(M, BALL)

    ch, sh = math.cosh(s1 / 2), math.sinh(s1 / 2)
    A = np.array([[ch, sh], [sh, ch]], dtype=complex)
    ch, sh = math.cosh(s2 / 2), math.sinh(s2 / 2)
    B = np.array([[ch, 1j * sh], [-1j * sh, ch]], dtype=complex)
    return embed(A), embed(B)
