"""Holomorphic and antiholomorphic isometries of the complex hyperbolic plane.

A holomorphic isometry is stored as a determinant-one lift preserving one
of the two built-in Hermitian forms.  An antiholomorphic isometry is stored
by its Souriau lift ``M``, encoding ``Z -> M conj(Z)``.

Classification follows the sign of the trace discriminant

    f(z) = |z|^4 - 8 Re(z^3) + 18 |z|^2 - 27

with eigenvalue analysis inside a scaled band around ``f = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from .hermlin import (
    BALL,
    CUBE_ROOTS_OF_UNITY,
    DEFAULT_TOL,
    SIEGEL,
    FormError,
    GeometryError,
    HermitianForm,
    Location,
    ProjectivePoint,
    ToleranceConfig,
    as_matrix,
    as_vector,
    cayley,
    cubic_roots,
    eigensystem,
    form_from_json,
    form_to_json,
    inner,
    locate,
    matrix_from_json,
    matrix_to_json,
    norm2,
    normalized_lift,
    su_normalize,
    unit,
)


class ClassTag(Enum):
    IDENTITY = "identity"
    REGULAR_ELLIPTIC = "regular_elliptic"
    COMPLEX_REFLECTION = "complex_reflection"
    COMPLEX_REFLECTION_IN_POINT = "complex_reflection_in_point"
    SPECIAL_ELLIPTIC_OTHER = "special_elliptic_other"
    UNIPOTENT_2STEP = "unipotent_2step"
    UNIPOTENT_3STEP = "unipotent_3step"
    SCREW_PARABOLIC = "screw_parabolic"
    LOXODROMIC = "loxodromic"


ELLIPTIC_TAGS = frozenset(
    {
        ClassTag.REGULAR_ELLIPTIC,
        ClassTag.COMPLEX_REFLECTION,
        ClassTag.COMPLEX_REFLECTION_IN_POINT,
        ClassTag.SPECIAL_ELLIPTIC_OTHER,
    }
)
PARABOLIC_TAGS = frozenset(
    {ClassTag.UNIPOTENT_2STEP, ClassTag.UNIPOTENT_3STEP, ClassTag.SCREW_PARABOLIC}
)


class AmbiguousClassification(GeometryError):
    """Raised when an input sits inside a tolerance band between classes."""

    def __init__(self, candidates, detail: str = ""):
        self.candidates = tuple(candidates)
        self.detail = detail
        names = ", ".join(c.name for c in self.candidates)
        super().__init__(f"ambiguous classification between {names}" + (f": {detail}" if detail else ""))


# ---------------------------------------------------------------------------
# isometry types


@dataclass(frozen=True, eq=False)
class HoloIsometry:
    """A holomorphic isometry given by an SU(2,1) lift."""

    lift: np.ndarray
    form: HermitianForm

    @classmethod
    def of(cls, M, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> "HoloIsometry":
        N = su_normalize(M, form, tol)
        N.setflags(write=False)
        return cls(N, form)

    @classmethod
    def identity(cls, form: HermitianForm) -> "HoloIsometry":
        return cls.of(np.eye(3), form)

    def __matmul__(self, other: "HoloIsometry") -> "HoloIsometry":
        _same_form(self.form, other.form)
        return HoloIsometry.of(self.lift @ other.lift, self.form)

    def inverse(self) -> "HoloIsometry":
        H = self.form.matrix
        # for M in U(2,1), M^-1 = H^-1 M^* H
        return HoloIsometry.of(np.linalg.solve(H, self.lift.conj().T @ H), self.form)

    def apply(self, Z) -> np.ndarray:
        return self.lift @ as_vector(Z)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.lift))

    def to_model(self, model) -> "HoloIsometry":
        from .hermlin import form_for

        target = form_for(model)
        if target == self.form:
            return self
        return HoloIsometry.of(cayley(self.lift, self.form.model, "holo"), target)

    def to_json(self) -> dict:
        return {"form": form_to_json(self.form), "lift": matrix_to_json(self.lift)}

    @classmethod
    def from_json(cls, obj) -> "HoloIsometry":
        if not isinstance(obj, dict) or "lift" not in obj or "form" not in obj:
            raise GeometryError("isometry JSON needs 'form' and 'lift'")
        return cls.of(matrix_from_json(obj["lift"]), form_from_json(obj["form"]))

    def __repr__(self):
        return f"HoloIsometry({self.form.model.name}, trace={self.trace:.6g})"


@dataclass(frozen=True, eq=False)
class AntiIsometry:
    """An antiholomorphic isometry ``Z -> souriau @ conj(Z)``.

    The Souriau lift is rescaled to ``|det| = 1``; the remaining unit
    scalar does not affect ``M conj(M)``.
    """

    souriau: np.ndarray
    form: HermitianForm

    @classmethod
    def of(cls, M, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> "AntiIsometry":
        M = as_matrix(M)
        det = abs(np.linalg.det(M))
        if det == 0:
            raise FormError("singular Souriau lift")
        M = M / det ** (1 / 3)
        err = np.linalg.norm(M.conj().T @ form.matrix @ M - form.matrix)
        if err > tol.eq_tol * max(1.0, np.linalg.norm(M) ** 2) * 10:
            raise FormError("Souriau lift does not preserve the Hermitian form")
        M.setflags(write=False)
        return cls(M, form)

    @classmethod
    def standard(cls, form: HermitianForm) -> "AntiIsometry":
        """Coordinatewise complex conjugation (both built-in forms are real)."""
        return cls.of(np.eye(3), form)

    def apply(self, Z) -> np.ndarray:
        return self.souriau @ np.conj(as_vector(Z))

    def to_model(self, model) -> "AntiIsometry":
        from .hermlin import form_for

        target = form_for(model)
        if target == self.form:
            return self
        return AntiIsometry.of(cayley(self.souriau, self.form.model, "anti"), target)

    def to_json(self) -> dict:
        return {"form": form_to_json(self.form), "souriau": matrix_to_json(self.souriau)}

    @classmethod
    def from_json(cls, obj) -> "AntiIsometry":
        if not isinstance(obj, dict) or "souriau" not in obj or "form" not in obj:
            raise GeometryError("anti-isometry JSON needs 'form' and 'souriau'")
        return cls.of(matrix_from_json(obj["souriau"]), form_from_json(obj["form"]))

    def __repr__(self):
        return f"AntiIsometry({self.form.model.name})"


def _same_form(f1: HermitianForm, f2: HermitianForm):
    if f1 != f2:
        raise FormError(f"operands live on different forms: {f1.model.name} vs {f2.model.name}")


def projective_distance(M, N) -> float:
    """Distance between two matrices (or vectors) modulo nonzero scalars.

    Both are scaled to unit Frobenius norm and N is rotated by the phase
    best aligning it with M.
    """
    M = np.asarray(M, dtype=complex)
    N = np.asarray(N, dtype=complex)
    Mh = M / np.linalg.norm(M)
    Nh = N / np.linalg.norm(N)
    s = np.vdot(Nh, Mh)
    phase = s / abs(s) if abs(s) > 0 else 1.0
    return float(np.linalg.norm(Mh - phase * Nh))


def pu_equal(A, B, tol: float = 1e-8) -> bool:
    """Equality in PU(2,1) of two lifts (or Souriau lifts)."""
    a = A.lift if isinstance(A, HoloIsometry) else A.souriau if isinstance(A, AntiIsometry) else A
    b = B.lift if isinstance(B, HoloIsometry) else B.souriau if isinstance(B, AntiIsometry) else B
    return projective_distance(a, b) <= tol


# ---------------------------------------------------------------------------
# trace discriminant and classification


def goldman_f(z: complex) -> float:
    """|z|^4 - 8 Re(z^3) + 18 |z|^2 - 27.

    f is invariant under z -> omega z.  Near the cusps 3*omega^k the
    expansion in w = omega^-k z - 3,

        f = |w|^4 + 4 u (u^2 + 9 v^2) + 108 v^2,  w = u + i v,

    avoids the cancellation of the direct formula.
    """
    z = complex(z)
    k = min(range(3), key=lambda j: abs(z - 3 * CUBE_ROOTS_OF_UNITY[j]))
    if abs(z - 3 * CUBE_ROOTS_OF_UNITY[k]) < 1.0:
        w = z * CUBE_ROOTS_OF_UNITY[k].conjugate() - 3
        u, v = w.real, w.imag
        r2 = u * u + v * v
        return r2 * r2 + 4 * u * (u * u + 9 * v * v) + 108 * v * v
    r2 = z.real ** 2 + z.imag ** 2
    return r2 * r2 - 8 * (z ** 3).real + 18 * r2 - 27


F_BAND_RTOL = 1e-7
STEP2_RTOL = 1e-8
STEP3_RTOL = 1e-5
SEMISIMPLE_RTOL = (1e-6, 1e-4)


def gap_tolerance(A: "HoloIsometry") -> float:
    """Eigenvalue separation below which two roots are treated as one.

    Round-off in the trace splits a double root by roughly the square root
    of the trace error, which grows with the size of the lift.
    """
    return 2e-6 * math.sqrt(max(1.0, float(np.linalg.norm(A.lift))))


def iso_eigensystem(A: "HoloIsometry"):
    """Eigensystem of an SU(2,1) lift, using char. polynomial X^3 - tX^2 + conj(t)X - 1."""
    tau = A.trace
    n = max(1.0, float(np.linalg.norm(A.lift)))
    roots = cubic_roots(-tau, tau.conjugate(), -1.0, snap_rtol=1e-13 * n * n)
    return eigensystem(A.lift, roots=roots, cluster_rtol=gap_tolerance(A))


@dataclass(frozen=True)
class IsometryClass:
    tag: ClassTag
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"tag": self.tag.value}
        out.update(_jsonable(self.payload))
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj


def _cusp_index(tau: complex, radius: float = 1e-3) -> int | None:
    for k, om in enumerate(CUBE_ROOTS_OF_UNITY):
        if abs(tau - 3 * om) <= radius:
            return k
    return None


def _unipotent_part(A: HoloIsometry, k: int) -> np.ndarray:
    return CUBE_ROOTS_OF_UNITY[k].conjugate() * A.lift - np.eye(3)


def _classify_cusp(A: HoloIsometry, k: int) -> ClassTag | None:
    """Identity / 2-step / 3-step for a lift near omega^k * unipotent.

    Returns None when the lift is not unipotent up to the cube root.
    """
    E = _unipotent_part(A, k)
    scale = max(1.0, np.linalg.norm(A.lift))
    nE = np.linalg.norm(E)
    if nE <= 1e-9 * scale:
        return ClassTag.IDENTITY
    E2 = E @ E
    E3 = E2 @ E
    n3 = np.linalg.norm(E3)
    if n3 > 1e-12 * scale ** 3:
        if n3 >= 1e-4 * nE ** 3:
            return None
        raise AmbiguousClassification(
            (ClassTag.UNIPOTENT_3STEP, ClassTag.SCREW_PARABOLIC), f"|E^3|/|E|^3 = {n3 / nE ** 3:.3g}"
        )
    ratio = np.linalg.norm(E2) / nE ** 2
    if ratio <= STEP2_RTOL:
        return ClassTag.UNIPOTENT_2STEP
    if ratio >= STEP3_RTOL:
        return ClassTag.UNIPOTENT_3STEP
    raise AmbiguousClassification(
        (ClassTag.UNIPOTENT_2STEP, ClassTag.UNIPOTENT_3STEP), f"|E^2|/|E|^2 = {ratio:.3g}"
    )


def _gram(form: HermitianForm, V: np.ndarray) -> np.ndarray:
    return V.conj().T @ form.matrix @ V


def classify(A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> IsometryClass:
    """Classify ``A`` by the sign of f(trace), refined by eigenvalue data.

    Raises :class:`AmbiguousClassification` when the input falls into a
    tolerance band between two classes.
    """
    tau = A.trace
    fval = goldman_f(tau)
    band = F_BAND_RTOL * (1 + abs(tau) ** 4)
    payload = {"trace": tau, "f": fval}

    if fval < -band:
        es = iso_eigensystem(A)
        payload["eigenvalues"] = list(es.eigenvalues)
        return IsometryClass(ClassTag.REGULAR_ELLIPTIC, payload)
    if fval > band:
        es = iso_eigensystem(A)
        payload["eigenvalues"] = list(es.eigenvalues)
        r = max(abs(l) for l in es.eigenvalues)
        payload["log_modulus"] = math.log(r)
        return IsometryClass(ClassTag.LOXODROMIC, payload)

    k = _cusp_index(tau)
    if k is not None:
        tag = _classify_cusp(A, k)
        if tag is not None:
            payload["eigenvalues"] = [CUBE_ROOTS_OF_UNITY[k]] * 3
            return IsometryClass(tag, payload)

    es = iso_eigensystem(A)
    vals = es.eigenvalues
    payload["eigenvalues"] = list(vals)
    gaps = sorted(abs(vals[i] - vals[j]) for i in range(3) for j in range(i + 1, 3))
    lo = gap_tolerance(A)
    if lo < gaps[0] < 100 * lo:
        raise AmbiguousClassification(
            (ClassTag.REGULAR_ELLIPTIC, ClassTag.COMPLEX_REFLECTION, ClassTag.SCREW_PARABOLIC),
            f"eigenvalue gap {gaps[0]:.3g}",
        )
    clusters = es.clusters
    if len(clusters) == 3:
        if all(abs(abs(l) - 1) <= 1e-6 for l in vals):
            return IsometryClass(ClassTag.REGULAR_ELLIPTIC, payload)
        return IsometryClass(ClassTag.LOXODROMIC, payload)
    if len(clusters) == 2:
        double = next(c for c in clusters if c.multiplicity == 2)
        single = next(c for c in clusters if c.multiplicity == 1)
        sv = np.linalg.svd(A.lift - double.value * np.eye(3), compute_uv=False)
        ratio = sv[1] / sv[0]
        if SEMISIMPLE_RTOL[0] < ratio < SEMISIMPLE_RTOL[1]:
            raise AmbiguousClassification(
                (ClassTag.COMPLEX_REFLECTION, ClassTag.SCREW_PARABOLIC), f"rank ratio {ratio:.3g}"
            )
        if ratio >= SEMISIMPLE_RTOL[1] or double.geometric_multiplicity == 1:
            payload["angle"] = cmath.phase(single.value / double.value)
            return IsometryClass(ClassTag.SCREW_PARABOLIC, payload)
        g = np.linalg.eigvalsh(_gram(A.form, double.vectors))
        if g[0] < -1e-6 and g[1] > 1e-6:
            payload["angle"] = cmath.phase(single.value / double.value)
            return IsometryClass(ClassTag.COMPLEX_REFLECTION, payload)
        if g[0] > 1e-6:
            payload["angle"] = cmath.phase(double.value / single.value)
            return IsometryClass(ClassTag.COMPLEX_REFLECTION_IN_POINT, payload)
    raise AmbiguousClassification(
        (ClassTag.COMPLEX_REFLECTION, ClassTag.SCREW_PARABOLIC), "degenerate eigenspace"
    )


def unipotent_step(A: HoloIsometry) -> int:
    tau = A.trace
    k = _cusp_index(tau)
    tag = _classify_cusp(A, k) if k is not None else None
    if tag is ClassTag.UNIPOTENT_2STEP:
        return 2
    if tag is ClassTag.UNIPOTENT_3STEP:
        return 3
    raise GeometryError("input is not a nontrivial unipotent isometry")


# ---------------------------------------------------------------------------
# fixed points and conjugacy invariants


class FixedPoint(NamedTuple):
    point: ProjectivePoint
    eigenvalue: complex


def _space_points(form: HermitianForm, V: np.ndarray, tol: ToleranceConfig):
    """Closure points inside a 2-dimensional eigenspace.

    Indefinite spaces contribute their negative direction; degenerate
    ones their null direction; definite ones nothing.
    """
    G = _gram(form, V)
    w, U = np.linalg.eigh(G)
    scale = max(1.0, float(np.max(np.abs(w))))
    out = []
    if w[0] < -tol.boundary_tol * scale:
        out.append(V @ U[:, 0])
    elif abs(w[0]) <= 1e-7 * scale:
        out.append(V @ U[:, 0])
    return out


def fixed_points_closure(
    A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL
) -> list[FixedPoint]:
    """Eigenvectors of ``A`` projecting into the closed ball, with eigenvalues."""
    tag = classify(A, tol).tag
    if tag is ClassTag.IDENTITY:
        raise GeometryError("the identity fixes every point")
    if tag in PARABOLIC_TAGS:
        v, lam = _parabolic_fixed_vector(A, tag)
        return [FixedPoint(ProjectivePoint.of(v, A.form, tol), lam)]
    es = iso_eigensystem(A)
    out = []
    for c in es.clusters:
        vecs = [c.vectors[:, 0]] if c.geometric_multiplicity == 1 else _space_points(A.form, c.vectors, tol)
        for v in vecs:
            v = unit(v)
            loc = locate(A.form, v, tol)
            if loc is Location.EXTERIOR:
                continue
            if loc is Location.BOUNDARY and tag in PARABOLIC_TAGS | {ClassTag.LOXODROMIC}:
                v = _refine_null(A, c.value, v)
            out.append(FixedPoint(ProjectivePoint.of(v, A.form, tol), c.value))
    return out


def _dominant_column(N: np.ndarray) -> np.ndarray:
    return unit(N[:, int(np.argmax(np.linalg.norm(N, axis=0)))])


def _parabolic_fixed_vector(A: HoloIsometry, tag: ClassTag) -> tuple[np.ndarray, complex]:
    """Null fixed vector of a parabolic map from ranges of nilpotent parts.

    Eigenvectors of defective clusters are only accurate to sqrt(eps);
    the range of the nilpotent part is accurate to eps.
    """
    if tag is not ClassTag.SCREW_PARABOLIC:
        k = _cusp_index(A.trace)
        E = _unipotent_part(A, k)
        v = _dominant_column(E @ E if tag is ClassTag.UNIPOTENT_3STEP else E)
        return v, CUBE_ROOTS_OF_UNITY[k]
    es = iso_eigensystem(A)
    single = next(c for c in es.clusters if c.multiplicity == 1)
    c = single.vectors[:, 0]
    lam = (A.trace - single.value) / 2
    V = np.linalg.svd((A.form.matrix @ c).conj()[None, :])[2][1:].conj().T
    v = _dominant_column((A.lift - lam * np.eye(3)) @ V)
    return v, lam


def _refine_null(A: HoloIsometry, lam: complex, v: np.ndarray) -> np.ndarray:
    # one inverse-iteration step sharpens eigenvectors of near-defective clusters
    try:
        w = np.linalg.solve(A.lift - (lam + 1e-12) * np.eye(3), v)
        w = unit(w)
        if np.linalg.norm(A.lift @ w - lam * w) <= np.linalg.norm(A.lift @ v - lam * v):
            return w
    except np.linalg.LinAlgError:
        pass
    return v


class NegativeType(NamedTuple):
    eigenvalue: complex
    index: int
    vector: np.ndarray


def negative_type_eigenvalue(A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> NegativeType:
    """The eigenvalue of an elliptic lift whose eigenvector is negative.

    ``index`` is the position of that eigenvalue in ``iso_eigensystem(A).eigenvalues``.
    """
    tag = classify(A, tol).tag
    if tag not in ELLIPTIC_TAGS:
        raise GeometryError(f"negative type is defined for elliptics, got {tag.name}")
    es = iso_eigensystem(A)
    for c in es.clusters:
        vecs = [c.vectors[:, 0]] if c.geometric_multiplicity == 1 else _space_points(A.form, c.vectors, tol)
        for v in vecs:
            if norm2(A.form, unit(v)) < -tol.boundary_tol:
                idx = min(range(3), key=lambda i: abs(es.eigenvalues[i] - c.value))
                return NegativeType(c.value, idx, normalized_lift(A.form, v))
    raise GeometryError("no negative eigenvector found")


@dataclass(frozen=True)
class ConjugacyInvariant:
    eigenvalues: tuple[complex, complex, complex]
    negative_type_index: int | None
    parabolic_data: dict | None


def conjugacy_invariant(A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> ConjugacyInvariant:
    cls = classify(A, tol)
    vals = tuple(complex(v) for v in cls.payload["eigenvalues"])
    neg = None
    par = None
    if cls.tag in ELLIPTIC_TAGS:
        nt = negative_type_eigenvalue(A, tol)
        neg = min(range(3), key=lambda i: abs(vals[i] - nt.eigenvalue))
    elif cls.tag in PARABOLIC_TAGS:
        step = {ClassTag.UNIPOTENT_2STEP: 2, ClassTag.UNIPOTENT_3STEP: 3}.get(cls.tag)
        angle = 0.0
        if cls.tag is ClassTag.SCREW_PARABOLIC:
            es = iso_eigensystem(A)
            double = next(c for c in es.clusters if c.multiplicity == 2)
            single = next(c for c in es.clusters if c.multiplicity == 1)
            angle = cmath.phase(single.value / double.value)
        par = {"unipotent_step": step, "elliptic_angle": angle}
    return ConjugacyInvariant(vals, neg, par)


# ---------------------------------------------------------------------------
# standard representatives


def elliptic_standard(alpha: float, beta: float) -> HoloIsometry:
    """E_(alpha, beta) in the ball: (z1, z2) -> (e^{i alpha} z1, e^{i beta} z2)."""
    M = np.diag(
        [
            cmath.exp(1j * (2 * alpha - beta) / 3),
            cmath.exp(1j * (2 * beta - alpha) / 3),
            cmath.exp(-1j * (alpha + beta) / 3),
        ]
    )
    return HoloIsometry.of(M, BALL)


def heis_translation_matrix(z: complex, t: float) -> np.ndarray:
    z = complex(z)
    return np.array(
        [[1, -z.conjugate(), -(abs(z) ** 2 - 1j * t) / 2], [0, 1, z], [0, 0, 1]], dtype=complex
    )


def heis_translation(z: complex, t: float) -> HoloIsometry:
    """T_[z,t]: left multiplication by [z, t] on the Heisenberg group."""
    return HoloIsometry.of(heis_translation_matrix(z, t), SIEGEL)


def heis_rotation(theta: float) -> HoloIsometry:
    """R_theta: [w, s] -> [e^{i theta} w, s]."""
    a = cmath.exp(-1j * theta / 3)
    return HoloIsometry.of(np.diag([a, cmath.exp(2j * theta / 3), a]), SIEGEL)


def dilation(r: float) -> HoloIsometry:
    """D_r: [w, s] -> [r w, r^2 s]."""
    if not r > 0:
        raise GeometryError("dilation factor must be positive")
    return HoloIsometry.of(np.diag([r, 1.0, 1.0 / r]), SIEGEL)


def parabolic_u21_matrix(z: complex, t: float, theta: float) -> np.ndarray:
    z = complex(z)
    e = cmath.exp(1j * theta)
    return np.array(
        [[1, -z.conjugate() * e, -(abs(z) ** 2 - 1j * t) / 2], [0, e, z], [0, 0, 1]], dtype=complex
    )


def parabolic_standard(z: complex, t: float, theta: float, u21: bool = False):
    """P_(z,t,theta) = T_[z,t] R_theta.

    With ``u21=True`` the raw U(2,1) lift with diagonal (1, e^{i theta}, 1)
    is returned as a matrix instead of an SU(2,1) isometry.
    """
    if u21:
        return parabolic_u21_matrix(z, t, theta)
    M = heis_translation_matrix(z, t) @ np.diag(
        [cmath.exp(-1j * theta / 3), cmath.exp(2j * theta / 3), cmath.exp(-1j * theta / 3)]
    )
    return HoloIsometry.of(M, SIEGEL)


# ---------------------------------------------------------------------------
# antiholomorphic calculus


def anti_compose(phi: AntiIsometry, psi: AntiIsometry) -> HoloIsometry:
    """phi o psi, with lift M_phi conj(M_psi)."""
    _same_form(phi.form, psi.form)
    return HoloIsometry.of(phi.souriau @ np.conj(psi.souriau), phi.form)


def mixed_compose(A: HoloIsometry, phi: AntiIsometry, order: str = "holo_first") -> AntiIsometry:
    """Compose a holomorphic and an antiholomorphic isometry.

    ``order="holo_after"`` gives A o phi (lift A M); ``order="holo_first"``
    gives phi o A (lift M conj(A)).
    """
    _same_form(A.form, phi.form)
    if order == "holo_after":
        return AntiIsometry.of(A.lift @ phi.souriau, A.form)
    if order == "holo_first":
        return AntiIsometry.of(phi.souriau @ np.conj(A.lift), A.form)
    raise ValueError("order must be 'holo_first' or 'holo_after'")


def anti_apply(phi: AntiIsometry, p) -> ProjectivePoint:
    Z = p.representative if isinstance(p, ProjectivePoint) else p
    return ProjectivePoint.of(phi.apply(Z), phi.form)


def is_real_reflection(phi: AntiIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff phi is an involution, i.e. M conj(M) is scalar.

    In complex dimension two every antiholomorphic involution is a real
    reflection, so the algebraic test suffices.
    """
    M = phi.souriau
    K = M @ np.conj(M)
    c = np.trace(K) / 3
    scale = max(1.0, np.linalg.norm(M) ** 2)
    if np.linalg.norm(K - c * np.eye(3)) > 10 * tol.eq_tol * scale:
        return False
    return bool(abs(c ** 3 - 1) <= 1e-6)


# ---------------------------------------------------------------------------
# frames and square roots


def siegel_frame(P, form: HermitianForm, Q=None) -> np.ndarray:
    """Columns (P, c, Q) with Gram matrix equal to the Siegel form.

    P must be null.  Q, when given, must be null and not orthogonal to P.
    """
    P = as_vector(P)
    H = form.matrix
    if Q is None:
        e = max(np.eye(3, dtype=complex), key=lambda x: abs(np.conj(x) @ H @ P))
        s = np.conj(e) @ H @ P
        X = e / np.conj(s)
        k = norm2(form, X) / 2
        Q = X - k * P
    else:
        Q = as_vector(Q)
        s = inner(form, P, Q)
        if abs(s) < 1e-14:
            raise GeometryError("null vectors are orthogonal")
        Q = Q / np.conj(s)
    c = np.linalg.solve(H, np.conj(np.cross(P, Q)))
    c = c / math.sqrt(norm2(form, c))
    return np.column_stack([P, c, Q])


def ball_frame(v1, v2, P, form: HermitianForm) -> np.ndarray:
    """Columns (v1, v2, P) normalized to the ball Gram matrix."""
    cols = [normalized_lift(form, v1), normalized_lift(form, v2), normalized_lift(form, P)]
    return np.column_stack(cols)


def _scale_positive(A: HoloIsometry, tol: ToleranceConfig):
    """Cube root of unity w making every closure eigenvalue of wA positive."""
    fps = fixed_points_closure(A, tol)
    for om in CUBE_ROOTS_OF_UNITY:
        if all(
            abs((om * fp.eigenvalue).imag) <= 1e-7 * abs(fp.eigenvalue) and (om * fp.eigenvalue).real > 0
            for fp in fps
        ):
            return om, fps
    raise GeometryError("some closure fixed point has a non-positive eigenvalue")


def _orthonormal_complement_2d(form: HermitianForm, P: np.ndarray) -> np.ndarray:
    """A form-orthonormal basis (columns) of the positive plane P^perp."""
    H = form.matrix
    basis = []
    for e in np.eye(3, dtype=complex):
        v = e - (inner(form, e, P) / norm2(form, P)) * P
        for b in basis:
            v = v - inner(form, v, b) * b
        n = norm2(form, v)
        if n > 1e-6:
            basis.append(v / math.sqrt(n))
        if len(basis) == 2:
            break
    return np.column_stack(basis)


def anti_square_root(A: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> AntiIsometry | None:
    """An antiholomorphic phi with phi^2 = A, or None for 2-step unipotents."""
    form = A.form
    tag = classify(A, tol).tag
    if tag is ClassTag.IDENTITY:
        return AntiIsometry.standard(form)
    if tag is ClassTag.UNIPOTENT_2STEP:
        return None
    om, fps = _scale_positive(A, tol)
    L = om * A.lift

    if tag in ELLIPTIC_TAGS:
        P = normalized_lift(form, fps[0].point.representative)
        B = _orthonormal_complement_2d(form, P)
        # B is form-orthonormal, so the restriction is unitary in these coordinates
        U = B.conj().T @ form.matrix @ L @ B
        w, V = np.linalg.eig(U)
        v1 = V[:, 0] / np.linalg.norm(V[:, 0])
        v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
        lam = complex(v1.conj() @ U @ v1)
        theta = cmath.phase(lam)
        F = ball_frame(B @ v1, B @ v2, P, form)
        e = cmath.exp(1j * theta / 2)
        Mstd = np.array([[0, e, 0], [1 / e, 0, 0], [0, 0, 1]], dtype=complex)
        M = F @ Mstd @ np.linalg.inv(np.conj(F))
    elif tag is ClassTag.LOXODROMIC:
        (p1, l1), (p2, l2) = [(fp.point.representative, (om * fp.eigenvalue).real) for fp in fps]
        if l1 < l2:
            (p1, l1), (p2, l2) = (p2, l2), (p1, l1)
        F = siegel_frame(p1, form, p2)
        r = l1
        M = F @ np.diag([math.sqrt(r), 1.0, 1 / math.sqrt(r)]) @ np.linalg.inv(np.conj(F))
    elif tag is ClassTag.UNIPOTENT_3STEP:
        P = fps[0].point.representative
        F = siegel_frame(P, form)
        N = np.linalg.solve(F, L @ F)
        z = complex(N[1, 2])
        t = 2 * N[0, 2].imag
        zp = (abs(z) ** 2 + 1j * t) / (2 * z.conjugate())
        e = (z - zp) / zp.conjugate()
        e = e / abs(e)
        U = np.array([[1, -zp.conjugate() * e, -abs(zp) ** 2 / 2], [0, e, zp], [0, 0, 1]])
        M = F @ U @ np.linalg.inv(np.conj(F))
    else:
        raise GeometryError(f"no antiholomorphic square root for class {tag.name}")

    phi = AntiIsometry.of(M, form)
    if not pu_equal(anti_compose(phi, phi).lift, A.lift, 1e-7):
        raise GeometryError("square-root construction failed verification")
    return phi


# ---------------------------------------------------------------------------
# random generation


def _random_u2(rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_isometry_matrix(rng: np.random.Generator, form: HermitianForm, max_boost: float = 2.0) -> np.ndarray:
    """K1 . boost . K2 with Haar-like compact factors, in the requested model."""

    def K():
        M = np.zeros((3, 3), dtype=complex)
        M[:2, :2] = _random_u2(rng)
        M[2, 2] = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        return M

    s = rng.uniform(0, max_boost)
    boost = np.array(
        [[math.cosh(s), 0, math.sinh(s)], [0, 1, 0], [math.sinh(s), 0, math.cosh(s)]], dtype=complex
    )
    G = K() @ boost @ K()
    if form == SIEGEL:
        G = cayley(G, "ball", "holo")
    return G


def random_isometry(rng: np.random.Generator, form: HermitianForm, max_boost: float = 2.0) -> HoloIsometry:
    return HoloIsometry.of(random_isometry_matrix(rng, form, max_boost), form)


def conjugate(G: HoloIsometry, A: HoloIsometry) -> HoloIsometry:
    """G A G^-1."""
    return G @ A @ G.inverse()


def random_real_reflection(rng: np.random.Generator, form: HermitianForm, max_boost: float = 2.0) -> AntiIsometry:
    """G sigma0 G^-1 for a random G; its Souriau lift is G conj(G)^-1."""
    G = random_isometry_matrix(rng, form, max_boost)
    return AntiIsometry.of(G @ np.linalg.inv(np.conj(G)), form)


def classification_to_json(c: IsometryClass) -> dict:
    return c.to_json()
