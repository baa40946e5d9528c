"""Boundary geometry of the Siegel model: the Heisenberg group and its fans.

Points of the boundary minus ``q_inf = (1,0,0)`` are written ``[z, t]``
with the group law

    [z1, t1] . [z2, t2] = [z1 + z2, t1 + t2 + 2 Im(z1 conj(z2))].

The contact plane at ``[x + iy, t]`` is the kernel of the left-invariant
form ``dt + 2x dy - 2y dx``; its horizontal left-invariant fields are
``d/dx + 2y d/dt`` and ``d/dy - 2x d/dt``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np

from .hermlin import (
    DEFAULT_TOL,
    SIEGEL,
    GeometryError,
    ToleranceConfig,
    as_vector,
    complex_from_json,
    complex_to_json,
)
from .isometry import (
    AntiIsometry,
    ClassTag,
    HoloIsometry,
    classify,
    pu_equal,
    siegel_frame,
)

Real = Union[float, int, Fraction]

Q_INF = np.array([1.0, 0.0, 0.0], dtype=complex)


@dataclass(frozen=True)
class HeisPoint:
    """A point [x + iy, t] of the Heisenberg group.

    Coordinates are kept as separate reals so that rational inputs
    (``Fraction``) are multiplied exactly.
    """

    x: Real
    y: Real
    t: Real

    @classmethod
    def of(cls, z, t: Real) -> "HeisPoint":
        if isinstance(z, (tuple, list)):
            return cls(z[0], z[1], t)
        z = complex(z) if not isinstance(z, (int, Fraction)) else z
        if isinstance(z, (int, Fraction)):
            return cls(z, 0, t)
        return cls(z.real, z.imag, t)

    @property
    def z(self) -> complex:
        return complex(float(self.x), float(self.y))

    def __mul__(self, other: "HeisPoint") -> "HeisPoint":
        return heis_mul(self, other)

    def inverse(self) -> "HeisPoint":
        return HeisPoint(-self.x, -self.y, -self.t)

    def to_json(self) -> dict:
        return {"z": complex_to_json(self.z), "t": float(self.t)}

    @classmethod
    def from_json(cls, obj) -> "HeisPoint":
        if not isinstance(obj, dict) or "z" not in obj or "t" not in obj:
            raise GeometryError("Heisenberg point JSON needs 'z' and 't'")
        return cls.of(complex_from_json(obj["z"]), float(obj["t"]))

    def close_to(self, other: "HeisPoint", tol: float = 1e-10) -> bool:
        return abs(self.z - other.z) <= tol and abs(float(self.t) - float(other.t)) <= tol


def heis_mul(a: HeisPoint, b: HeisPoint) -> HeisPoint:
    # Im(z1 conj z2) = y1 x2 - x1 y2
    return HeisPoint(a.x + b.x, a.y + b.y, a.t + b.t + 2 * (a.y * b.x - a.x * b.y))


@dataclass(frozen=True)
class HorosphericalPoint:
    z: complex
    t: float
    u: float = 0.0

    def __post_init__(self):
        if self.u < 0:
            raise GeometryError("horospherical height must be non-negative")


def standard_lift(p) -> np.ndarray:
    """((-|z|^2 - u + it)/2, z, 1)."""
    if isinstance(p, HeisPoint):
        z, t, u = p.z, float(p.t), 0.0
    else:
        z, t, u = complex(p.z), float(p.t), float(p.u)
    return np.array([(-abs(z) ** 2 - u + 1j * t) / 2, z, 1.0], dtype=complex)


def horospherical_coordinates(Z) -> HorosphericalPoint:
    """Inverse of :func:`standard_lift` (requires Z[2] != 0)."""
    Z = as_vector(Z)
    if abs(Z[2]) <= 1e-14 * np.linalg.norm(Z):
        raise GeometryError("the point at infinity has no horospherical coordinates")
    Z = Z / Z[2]
    z = complex(Z[1])
    t = 2 * Z[0].imag
    u = -2 * Z[0].real - abs(z) ** 2
    return HorosphericalPoint(z, t, max(u, 0.0) if u > -1e-9 else u)


def heis_from_lift(Z) -> HeisPoint:
    h = horospherical_coordinates(Z)
    return HeisPoint.of(h.z, h.t)


# ---------------------------------------------------------------------------
# actions of the stabilizer of q_inf


def _check_fixes_infinity(M: np.ndarray):
    if np.linalg.norm(M[1:, 0]) > 1e-9 * np.linalg.norm(M):
        raise GeometryError("isometry does not fix q_inf")


def boundary_action(g, p: HeisPoint, allow_dilation: bool = True) -> HeisPoint:
    """Image of p under an isometry fixing q_inf, via the matrix action."""
    M = g.lift if isinstance(g, HoloIsometry) else np.asarray(g, dtype=complex)
    _check_fixes_infinity(M)
    if not allow_dilation and abs(abs(M[0, 0]) - abs(M[2, 2])) > 1e-9 * abs(M[2, 2]):
        raise GeometryError("a Heisenberg isometry is required, got a dilation")
    return heis_from_lift(M @ standard_lift(p))


def anti_boundary_action(phi: AntiIsometry, p: HeisPoint) -> HeisPoint:
    M = phi.souriau
    _check_fixes_infinity(M)
    return heis_from_lift(M @ np.conj(standard_lift(p)))


def vertical_projection(p: HeisPoint) -> complex:
    """[z, t] -> z."""
    return p.z


class AffineMap(NamedTuple):
    """w -> rotation * w + shift."""

    rotation: complex
    shift: complex

    def __call__(self, w: complex) -> complex:
        return self.rotation * w + self.shift


def pi_star(g) -> AffineMap:
    """Induced Euclidean motion of C for an element of Isom(N)."""
    M = g.lift if isinstance(g, HoloIsometry) else np.asarray(g, dtype=complex)
    _check_fixes_infinity(M)
    if abs(abs(M[0, 0]) - abs(M[2, 2])) > 1e-9 * abs(M[2, 2]):
        raise GeometryError("dilations do not induce Euclidean isometries")
    return AffineMap(complex(M[1, 1] / M[0, 0]), complex(M[1, 2] / M[2, 2]))


def translation_parameters(g) -> tuple[complex, float]:
    """(z, t) for a Heisenberg translation T_[z,t] (up to a scalar lift)."""
    M = g.lift if isinstance(g, HoloIsometry) else np.asarray(g, dtype=complex)
    _check_fixes_infinity(M)
    N = M / M[2, 2]
    return complex(N[1, 2]), float(2 * N[0, 2].imag)


# ---------------------------------------------------------------------------
# contact structure and infinite R-circles


def contact_form_eval(at: HeisPoint, tangent) -> float:
    """dt + 2x dy - 2y dx at ``at`` on ``tangent = (dx, dy, dt)``."""
    dx, dy, dt = tangent
    return float(dt) + 2 * float(at.x) * float(dy) - 2 * float(at.y) * float(dx)


@dataclass(frozen=True)
class InfiniteRCircle:
    """The affine line s -> [base.z + s*direction, base.t + s*slope]."""

    base: HeisPoint
    direction: complex
    slope: float

    def point(self, s: float) -> HeisPoint:
        z = self.base.z + s * complex(self.direction)
        return HeisPoint.of(z, float(self.base.t) + s * self.slope)

    @property
    def tangent(self) -> tuple[float, float, float]:
        d = complex(self.direction)
        return (d.real, d.imag, float(self.slope))


def is_infinite_rcircle(line: InfiniteRCircle, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff the line is horizontal, i.e. tangent to the contact plane.

    Along an affine line the contact form takes a constant value, so one
    point suffices.  Vertical lines are never R-circles.
    """
    if abs(complex(line.direction)) == 0:
        return False
    val = contact_form_eval(line.base, line.tangent)
    scale = max(1.0, abs(complex(line.direction)), abs(line.slope))
    return abs(val) <= tol.eq_tol * scale * max(1.0, abs(line.base.z))


# ---------------------------------------------------------------------------
# fans


@dataclass(frozen=True, eq=False)
class Fan:
    """The fan above the affine line {w(s + ik) : s real}.

    ``conjugator`` (when set) maps standard Siegel coordinates, where the
    fan is based at q_inf, to the coordinates of the original isometry.
    """

    w: complex
    k: float
    conjugator: np.ndarray | None = None

    def __post_init__(self):
        if abs(abs(complex(self.w)) - 1) > 1e-9:
            raise GeometryError("fan direction must have unit modulus")

    @property
    def at_infinity(self) -> bool:
        return self.conjugator is None

    def to_json(self) -> dict:
        return {"w": complex_to_json(self.w), "k": float(self.k)}

    @classmethod
    def from_json(cls, obj) -> "Fan":
        if not isinstance(obj, dict) or "w" not in obj or "k" not in obj:
            raise GeometryError("fan JSON needs 'w' and 'k'")
        return cls(complex_from_json(obj["w"]), float(obj["k"]))


def _standardize(P: HoloIsometry) -> tuple[np.ndarray, np.ndarray | None]:
    """Conjugate P so that it fixes q_inf in Siegel coordinates."""
    M = P.lift
    if P.form == SIEGEL and np.linalg.norm(M[1:, 0]) <= 1e-10 * np.linalg.norm(M):
        return M, None
    from .isometry import fixed_points_closure

    fp = fixed_points_closure(P)[0].point.representative
    G = siegel_frame(fp, P.form)
    return np.linalg.solve(G, M @ G), G


def invariant_fan(P: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> Fan:
    """Fan(w = z/|z|, k = t/(4|z|)) of a 3-step unipotent T_[z,t]."""
    if classify(P, tol).tag is not ClassTag.UNIPOTENT_3STEP:
        raise GeometryError("invariant fans belong to 3-step unipotent isometries")
    N, G = _standardize(P)
    z, t = translation_parameters(N)
    return Fan(z / abs(z), t / (4 * abs(z)), G)


def fan_leaf(F: Fan, t0: float) -> InfiniteRCircle:
    """The leaf {[w(s + ik), t0 + 2sk]} of the real-plane foliation of F."""
    if not F.at_infinity:
        raise GeometryError("fan is not based at q_inf; apply its conjugator first")
    return InfiniteRCircle(HeisPoint.of(complex(F.w) * 1j * F.k, t0), complex(F.w), 2 * F.k)


def leaf_through(F: Fan, p: HeisPoint) -> float:
    """The t0 of the leaf containing a point of the boundary plane of F."""
    w = complex(F.w)
    s = (w.conjugate() * p.z).real
    return float(p.t) - 2 * s * F.k


def fans_parallel(F1: Fan, F2: Fan, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return abs((complex(F2.w) * complex(F1.w).conjugate()).imag) <= tol.angle_tol


class CommuteVerdict(NamedTuple):
    lemma: bool
    matrix: bool

    def __bool__(self):
        return self.lemma


def _rotation_center(M: np.ndarray) -> complex:
    rot, shift = pi_star(M)
    return shift / (1 - rot)


def parabolics_commute_at_infinity(P1: HoloIsometry, P2: HoloIsometry, tol: ToleranceConfig = DEFAULT_TOL) -> CommuteVerdict:
    """Commutation of two parabolics fixing q_inf, by Heisenberg data.

    3-step pairs commute iff z2 conj(z1) is real; 2-step unipotents are
    central in Isom(N); screw parabolics commute iff they share their
    stable vertical line.  The second field is the direct matrix check.
    """
    tags = []
    for P in (P1, P2):
        if P.form != SIEGEL or np.linalg.norm(P.lift[1:, 0]) > 1e-10 * np.linalg.norm(P.lift):
            raise GeometryError("parabolics must fix q_inf in the Siegel model")
        tag = classify(P, tol).tag
        if tag not in (ClassTag.UNIPOTENT_2STEP, ClassTag.UNIPOTENT_3STEP, ClassTag.SCREW_PARABOLIC):
            raise GeometryError(f"expected a parabolic isometry, got {tag.name}")
        tags.append(tag)
    if ClassTag.UNIPOTENT_2STEP in tags:
        lemma = True
    elif tags == [ClassTag.UNIPOTENT_3STEP, ClassTag.UNIPOTENT_3STEP]:
        z1, _ = translation_parameters(P1)
        z2, _ = translation_parameters(P2)
        lemma = abs((z2 * z1.conjugate()).imag) <= tol.eq_tol * max(1.0, abs(z1) * abs(z2))
    elif tags == [ClassTag.SCREW_PARABOLIC, ClassTag.SCREW_PARABOLIC]:
        lemma = abs(_rotation_center(P1.lift) - _rotation_center(P2.lift)) <= 1e-9
    else:
        lemma = False
    matrix = pu_equal(P1.lift @ P2.lift, P2.lift @ P1.lift, 1e-9)
    return CommuteVerdict(bool(lemma), bool(matrix))


def rcircle_fan_orthogonal(L: InfiniteRCircle, F: Fan, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Orthogonality of L to the leaf of F that it meets.

    Both curves lie in the contact plane at the intersection point, where
    the projection to the (x, y)-plane is an isomorphism; orthogonality is
    measured there with the Euclidean metric.
    """
    if not F.at_infinity:
        raise GeometryError("fan is not based at q_inf")
    w = complex(F.w)
    d = complex(L.direction)
    if abs(d) == 0:
        raise GeometryError("vertical lines are not R-circles")
    cross = (w.conjugate() * d).imag
    if abs(cross) <= tol.angle_tol * abs(d):
        raise GeometryError("the line is parallel to or contained in the boundary of the fan")
    return abs((w.conjugate() * d).real) <= tol.angle_tol * abs(d)


def leaf_meeting(L: InfiniteRCircle, F: Fan, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[float, HeisPoint]:
    """The leaf t0 of F met by L, with the intersection point."""
    w = complex(F.w)
    d = complex(L.direction)
    cross = (w.conjugate() * d).imag
    if abs(cross) <= tol.angle_tol * max(abs(d), 1e-300):
        raise GeometryError("the line is parallel to or contained in the boundary of the fan")
    s = (F.k - (w.conjugate() * L.base.z).imag) / cross
    p = L.point(s)
    return leaf_through(F, p), p


def polar_of_vertical_line(a: complex) -> np.ndarray:
    """Polar vector of the vertical complex line above a in C."""
    return np.array([-complex(a).conjugate(), 1.0, 0.0], dtype=complex)


def vertical_line_base(c) -> complex:
    """Inverse of :func:`polar_of_vertical_line` (c must have c[2] = 0)."""
    c = as_vector(c)
    if abs(c[2]) > 1e-9 * np.linalg.norm(c) or abs(c[1]) < 1e-12:
        raise GeometryError("not the polar vector of a vertical complex line")
    return -complex(c[0] / c[1]).conjugate()


def reflection_rcircle(phi: AntiIsometry) -> InfiniteRCircle:
    """The infinite R-circle fixed by a real reflection fixing q_inf.

    On C the reflection acts by z -> u^2 conj(z) + b; its fixed line passes
    through b/2 with direction u.  On the fibre above b/2 it reverses t, so
    the fixed height is the midpoint of t = 0 and its image.
    """
    M = phi.souriau
    _check_fixes_infinity(M)
    M = M / M[2, 2]
    u = cmath.sqrt(complex(M[1, 1]))
    u = u / abs(u)
    z0 = complex(M[1, 2]) / 2
    img = heis_from_lift(M @ np.conj(standard_lift(HeisPoint.of(z0, 0.0))))
    base = HeisPoint.of(z0, float(img.t) / 2)
    return InfiniteRCircle(base, u, horizontal_slope(base, u))


def horizontal_slope(p: HeisPoint, u: complex) -> float:
    """Vertical rate making direction u horizontal at p."""
    return -2 * (p.z.conjugate() * complex(u)).imag
