"""Exact certificates for reflective generation of Picard modular groups.

Arithmetic is carried out in Q(i sqrt d) with rational coordinates, so every
identity below is checked without rounding.  Floating-point cross-checks
embed the exact matrices into numpy and reuse :mod:`chyp.decomp`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .hermlin import SIEGEL, GeometryError
from .heisenberg import HeisPoint, anti_boundary_action, heis_mul
from .isometry import AntiIsometry, HoloIsometry, is_real_reflection

SUPPORTED_D = (1, 2, 3, 7, 11)
CLAIMED_INDEX = {1: 8, 2: 4, 3: 2, 7: 2, 11: 2}
T_SEARCH_BOUND = 64


def _squarefree(d: int) -> bool:
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class QuadFieldScalar:
    """a + b i sqrt(d) with rational a, b."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        if not _squarefree(self.d):
            raise ValueError(f"d = {self.d} is not a positive squarefree integer")
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def of(cls, x, d: int) -> "QuadFieldScalar":
        if isinstance(x, QuadFieldScalar):
            if x.d != d:
                raise ValueError("mixed fields")
            return x
        return cls(Fraction(x), Fraction(0), d)

    def _coerce(self, other) -> "QuadFieldScalar":
        if isinstance(other, QuadFieldScalar):
            if other.d != self.d:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadFieldScalar(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldScalar(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadFieldScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadFieldScalar(
            self.a * o.a - self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conj(self) -> "QuadFieldScalar":
        return QuadFieldScalar(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        """x conj(x) = a^2 + d b^2."""
        return self.a * self.a + self.d * self.b * self.b

    def inv(self) -> "QuadFieldScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i sqrt d)")
        return QuadFieldScalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, n: int):
        out = QuadFieldScalar.of(1, self.d)
        base = self if n >= 0 else self.inv()
        for _ in range(abs(n)):
            out = out * base
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __complex__(self) -> complex:
        return complex(float(self.a), float(self.b) * math.sqrt(self.d))

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "d": self.d}

    def __repr__(self) -> str:
        return f"({self.a} + {self.b} i sqrt{self.d})"


def od_member(x: QuadFieldScalar) -> bool:
    """Membership in the ring of integers O_d."""
    if x.d % 4 == 3:
        a2, b2 = 2 * x.a, 2 * x.b
        return a2.denominator == 1 and b2.denominator == 1 and (a2.numerator - b2.numerator) % 2 == 0
    return x.a.denominator == 1 and x.b.denominator == 1


def q(a, b, d: int) -> QuadFieldScalar:
    return QuadFieldScalar(Fraction(a), Fraction(b), d)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class ExactMatrix:
    rows: tuple[tuple[QuadFieldScalar, ...], ...]
    d: int

    @classmethod
    def of(cls, rows: Iterable[Iterable], d: int) -> "ExactMatrix":
        rows = tuple(tuple(QuadFieldScalar.of(x, d) for x in r) for r in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("exact matrices are 3x3")
        return cls(rows, d)

    @classmethod
    def identity(cls, d: int) -> "ExactMatrix":
        return cls.of([[1 if i == j else 0 for j in range(3)] for i in range(3)], d)

    @classmethod
    def diag(cls, entries, d: int) -> "ExactMatrix":
        return cls.of([[entries[i] if i == j else 0 for j in range(3)] for i in range(3)], d)

    def __getitem__(self, ij) -> QuadFieldScalar:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.d != self.d:
            raise ValueError("mixed fields")
        return ExactMatrix.of(
            [[sum((self[i, k] * other[k, j] for k in range(3)), QuadFieldScalar.of(0, self.d)) for j in range(3)] for i in range(3)],
            self.d,
        )

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix.of([[c * x for x in r] for r in self.rows], self.d)

    def conj(self) -> "ExactMatrix":
        return ExactMatrix.of([[x.conj() for x in r] for r in self.rows], self.d)

    def adjoint(self) -> "ExactMatrix":
        return ExactMatrix.of([[self[j, i].conj() for j in range(3)] for i in range(3)], self.d)

    def det(self) -> QuadFieldScalar:
        m = self
        return (
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )

    def inverse(self) -> "ExactMatrix":
        m, det = self, self.det()
        if det.is_zero():
            raise ZeroDivisionError("singular exact matrix")
        cof = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [x for x in range(3) if x != i]
                c = [x for x in range(3) if x != j]
                minor = m[r[0], c[0]] * m[r[1], c[1]] - m[r[0], c[1]] * m[r[1], c[0]]
                cof[j][i] = minor if (i + j) % 2 == 0 else -minor
        return ExactMatrix.of(cof, self.d).scale(det.inv())

    def is_scalar(self) -> bool:
        c = self[0, 0]
        return all(self[i, j] == (c if i == j else QuadFieldScalar.of(0, self.d)) for i in range(3) for j in range(3))

    def is_upper_triangular(self) -> bool:
        return all(self[i, j].is_zero() for i in range(3) for j in range(i))

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.rows], dtype=complex)

    def to_json(self) -> list:
        return [[x.to_json() for x in r] for r in self.rows]


def h_siegel(d: int) -> ExactMatrix:
    return ExactMatrix.of([[0, 0, 1], [0, 1, 0], [1, 0, 0]], d)


@dataclass(frozen=True)
class SU21Check:
    form_preserved: bool
    det: QuadFieldScalar
    det_is_one: bool
    det_is_unit: bool

    def __bool__(self) -> bool:
        return self.form_preserved and self.det_is_one


def exact_su21_check(M: ExactMatrix) -> SU21Check:
    """M^* H M = H and det M = 1, exactly (det a unit is also reported)."""
    H = h_siegel(M.d)
    form = (M.adjoint() @ H @ M) == H
    det = M.det()
    one = QuadFieldScalar.of(1, M.d)
    return SU21Check(form, det, det == one, od_member(det) and det.norm() == 1)


def exact_entries_in_Od(M: ExactMatrix) -> bool:
    return all(od_member(x) for r in M.rows for x in r)


def heis_translation_exact(z: QuadFieldScalar, m: int) -> ExactMatrix:
    """T_[z,t] with t = m sqrt(d)/2, so the corner entry is -|z|^2/2 + i m sqrt(d)/4."""
    d = z.d
    corner = QuadFieldScalar(-z.norm() / 2, Fraction(m, 4), d)
    return ExactMatrix.of([[1, -z.conj(), corner], [0, 1, z], [0, 0, 1]], d)


# ---------------------------------------------------------------------------
# context


@dataclass(frozen=True)
class TranslationLift:
    z: QuadFieldScalar
    m: int
    matrix: ExactMatrix

    @property
    def t(self) -> float:
        return self.m * math.sqrt(self.z.d) / 2


@dataclass(frozen=True)
class PicardContext:
    d: int
    case: str
    generators: dict[str, ExactMatrix]
    lifts: dict[str, TranslationLift]
    sigmas: dict[str, ExactMatrix]
    unit_reflection: ExactMatrix | None = None


def _minimal_lift(z: QuadFieldScalar, bound: int = T_SEARCH_BOUND) -> TranslationLift:
    """Smallest |t| in (sqrt(d)/2) Z giving a lift with O_d entries (t >= 0 on ties)."""
    for k in range(bound + 1):
        for m in ((0,) if k == 0 else (k, -k)):
            M = heis_translation_exact(z, m)
            if exact_entries_in_Od(M):
                return TranslationLift(z, m, M)
    raise GeometryError(f"no lift of the translation by {z} with O_d entries for |m| <= {bound}")


def _case(d: int) -> str:
    if d % 4 == 3:
        return "I"
    if d % 4 == 2:
        return "II"
    return "III"


def translation_directions(d: int) -> tuple[QuadFieldScalar, QuadFieldScalar]:
    """Horizontal parts (z1, z2) of the orthogonal translation pair."""
    case = _case(d)
    if case == "I":
        # (T1, T2^2 T1^-1) with T2 the translation by (1 + i sqrt d)/2
        return q(1, 0, d), q(0, 1, d)
    if case == "II":
        return q(2, 0, d), q(0, 1, d)
    return q(2, 0, d), q(0, 2, d)


def unit_reflection(d: int) -> ExactMatrix | None:
    """Complex reflection of order 4 (d = 1) or 6 (d = 3) fixing q_inf, else None.

    For d = 3 no determinant-one lift has entries in O_3; the lift returned
    has unit determinant and is certified projectively.
    """
    if d == 1:
        i = q(0, 1, 1)
        return ExactMatrix.diag([i, -1, i], 1)
    if d == 3:
        zeta6 = q(Fraction(1, 2), Fraction(1, 2), 3)
        return ExactMatrix.diag([1, zeta6, 1], 3)
    return None


def build_context(d: int) -> PicardContext:
    if d not in SUPPORTED_D:
        raise GeometryError(f"d = {d} is not supported; use one of {SUPPORTED_D}")
    z1, z2 = translation_directions(d)
    T1, T2 = _minimal_lift(z1), _minimal_lift(z2)
    I0 = ExactMatrix.of([[0, 0, 1], [0, -1, 0], [1, 0, 0]], d)
    R1 = ExactMatrix.diag([-1, 1, -1], d)
    T0 = heis_translation_exact(QuadFieldScalar.of(0, d), 2)
    gens = {"I0": I0, "R1": R1, "T0": T0, "T1": T1.matrix, "T2": T2.matrix}
    E = ExactMatrix.identity(d)
    sigmas = {
        "sigma0": E,
        "sigma1": R1,
        "sigma2": T2.matrix,
        "sigma3": T1.matrix @ R1,
        "sigma4": I0,
    }
    U = unit_reflection(d)
    if U is not None:
        sigmas["sigma5"] = U
    return PicardContext(d, _case(d), gens, {"T1": T1, "T2": T2}, sigmas, U)


# ---------------------------------------------------------------------------
# exact Heisenberg projection


@dataclass(frozen=True)
class ExactAffine:
    """w -> rotation * w + shift."""

    rotation: QuadFieldScalar
    shift: QuadFieldScalar

    def __call__(self, w: QuadFieldScalar) -> QuadFieldScalar:
        return self.rotation * w + self.shift

    def is_identity(self) -> bool:
        return self.rotation == QuadFieldScalar.of(1, self.rotation.d) and self.shift.is_zero()


def pi_star_exact(P: ExactMatrix) -> ExactAffine:
    """Induced Euclidean motion of an upper-triangular element fixing q_inf."""
    if not P.is_upper_triangular():
        raise GeometryError("matrix does not fix q_inf")
    if P[0, 0].norm() != 1 or P[2, 2].norm() != 1 or P[1, 1].norm() != 1:
        raise GeometryError("diagonal entries must be exactly representable unit phases")
    return ExactAffine(P[1, 1] / P[0, 0], P[1, 2] / P[2, 2])


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    status: bool
    witness: object = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.status else "fail"}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, status: bool, witness=None):
        self.checks.append(Check(name, bool(status), witness))

    @property
    def ok(self) -> bool:
        return all(c.status for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.status]

    def to_json(self) -> list:
        return [c.to_json() for c in self.checks]


def verify_generators(ctx: PicardContext) -> Report:
    rep = Report()
    for name, M in ctx.generators.items():
        chk = exact_su21_check(M)
        rep.add(f"{name} in SU(2,1)", bool(chk))
        in_od = exact_entries_in_Od(M)
        if name == "T0":
            # T_[0, sqrt d] has corner i sqrt(d)/2, outside O_d; recorded, not required
            rep.add("T0 entries in O_d (informational)", True, {"in_Od": in_od})
        else:
            rep.add(f"{name} entries in O_d", in_od)
    for name in ("T1", "T2"):
        lift = ctx.lifts[name]
        rep.add(f"{name} minimal vertical parameter", True, {"z": lift.z.to_json(), "m": lift.m, "t": f"{lift.m}*sqrt({ctx.d})/2"})
    z1, z2 = ctx.lifts["T1"].z, ctx.lifts["T2"].z
    rep.add("T1, T2 directions orthogonal", (z1 * z2.conj()).a == 0)
    rep.add("T0 vertical", pi_star_exact(ctx.generators["T0"]).is_identity())
    if ctx.unit_reflection is not None:
        chk = exact_su21_check(ctx.unit_reflection)
        rep.add("unit reflection preserves the form", chk.form_preserved)
        rep.add("unit reflection determinant is a unit", chk.det_is_unit, {"det": chk.det.to_json()})
        rep.add("unit reflection entries in O_d", exact_entries_in_Od(ctx.unit_reflection))
        rot = pi_star_exact(ctx.unit_reflection).rotation
        order = next(n for n in range(1, 13) if rot ** n == QuadFieldScalar.of(1, ctx.d))
        rep.add("unit reflection rotation order", order == (4 if ctx.d == 1 else 6), {"order": order})
    return rep


def _float_holo(M: ExactMatrix) -> HoloIsometry:
    return HoloIsometry.of(M.to_numpy(), SIEGEL)


def _float_anti(M: ExactMatrix) -> AntiIsometry:
    return AntiIsometry.of(M.to_numpy(), SIEGEL)


def verify_sigma_family(ctx: PicardContext) -> Report:
    """Exact involution and closure checks on the sigma family, plus float cross-checks."""
    from .decomp import geometric_decomposes, reflection_decomposes

    rep = Report()
    E = ExactMatrix.identity(ctx.d)
    for name, A in ctx.sigmas.items():
        rep.add(f"{name}: M conj(M) = I", (A @ A.conj()) == E)
        rep.add(f"{name}: real reflection (float)", is_real_reflection(_float_anti(A)))
    names = list(ctx.sigmas)
    for i, ni in enumerate(names):
        for nj in names[i + 1 :]:
            Ai, Aj = ctx.sigmas[ni], ctx.sigmas[nj]
            P = Ai @ Aj.conj()
            chk = exact_su21_check(P)
            det_ok = chk.det_is_one or (ctx.unit_reflection is not None and chk.det_is_unit)
            rep.add(f"{ni}{nj}: product in U(2,1,O_d)", chk.form_preserved and det_ok and exact_entries_in_Od(P))
            # reversed product is the inverse, so the set of products is closed under inversion
            rep.add(f"{ni}{nj}: reversed product is inverse", (P @ (Aj @ Ai.conj())) == E)
    for name, A in ctx.generators.items():
        if name != "T0":
            rep.add(f"conj({name}) entries in O_d", exact_entries_in_Od(A.conj()))

    s0 = _float_anti(ctx.sigmas["sigma0"])
    s1 = _float_anti(ctx.sigmas["sigma1"])
    claims = [
        ("sigma0 decomposes R1", s0, "R1"),
        ("sigma0 decomposes I0", s0, "I0"),
        ("sigma0 decomposes T2", s0, "T2"),
        ("sigma1 decomposes T1", s1, "T1"),
    ]
    for label, s, g in claims:
        A = _float_holo(ctx.generators[g])
        alg = reflection_decomposes(s, A)
        geo = geometric_decomposes(s, A).decomposes
        rep.add(label, alg and geo, {"algebraic": alg, "geometric": geo})
    if ctx.unit_reflection is not None:
        U = _float_holo(ctx.unit_reflection)
        rep.add("sigma0 decomposes the unit reflection", reflection_decomposes(s0, U))

    # sigma1 acts as (z, t) -> (-conj z, -t); sigma3 is T1 composed with it
    s3 = _float_anti(ctx.sigmas["sigma3"])
    z1 = complex(ctx.lifts["T1"].z)
    t1 = ctx.lifts["T1"].t
    ok = True
    for p in (HeisPoint.of(0.3 + 0.7j, 0.2), HeisPoint.of(-1.1 + 0.4j, -0.9)):
        img1 = anti_boundary_action(s1, p)
        exp1 = HeisPoint.of(-p.z.conjugate(), -float(p.t))
        img3 = anti_boundary_action(s3, p)
        exp3 = heis_mul(HeisPoint.of(z1, t1), exp1)
        ok = ok and img1.close_to(exp1, 1e-9) and img3.close_to(exp3, 1e-9)
    rep.add("sigma1, sigma3 boundary actions", ok)
    return rep


def _power_of(C: ExactMatrix, T0: ExactMatrix, bound: int = 64) -> int | None:
    E = ExactMatrix.identity(C.d)
    if C == E:
        return 0
    P, Pinv, T0inv = E, E, T0.inverse()
    for k in range(1, bound + 1):
        P, Pinv = P @ T0, Pinv @ T0inv
        if C == P:
            return k
        if C == Pinv:
            return -k
    return None


def verify_commutator_relations(ctx: PicardContext) -> Report:
    """Measure k with [T2, T1] = T0^k and compare with the Heisenberg law."""
    rep = Report()
    T0, T1, T2 = ctx.generators["T0"], ctx.generators["T1"], ctx.generators["T2"]
    C = T2 @ T1 @ T2.inverse() @ T1.inverse()
    k = _power_of(C, T0)
    l1, l2 = ctx.lifts["T1"], ctx.lifts["T2"]
    # Heisenberg oracle: the commutator of [z2, .] and [z1, .] is vertical of size 4 Im(z2 conj z1)
    a = HeisPoint.of((Fraction(l2.z.a), Fraction(l2.z.b)), 0)
    b = HeisPoint.of((Fraction(l1.z.a), Fraction(l1.z.b)), 0)
    comm = heis_mul(heis_mul(heis_mul(a, b), a.inverse()), b.inverse())
    # y is stored without its sqrt(d) factor, so comm.t is the vertical size over sqrt(d)
    k_oracle = Fraction(comm.t)
    claimed_k = {"I": 1, "II": 4, "III": 4}[ctx.case]
    rep.add(
        "[T2, T1] is a power of T0",
        k is not None,
        {"k": k, "heisenberg_oracle_k": str(k_oracle), "claimed_k": claimed_k, "agrees_with_oracle": k is not None and k == k_oracle, "agrees_with_claim": k == claimed_k},
    )
    if ctx.case == "I":
        # the pair before the orthogonalizing substitution: T2 over (1 + i sqrt d)/2
        orig = _minimal_lift(q(Fraction(1, 2), Fraction(1, 2), ctx.d)).matrix
        k0 = _power_of(orig @ T1 @ orig.inverse() @ T1.inverse(), T0)
        rep.add("[T2', T1] is a power of T0 for T2' over (1 + i sqrt d)/2", k0 is not None, {"k": k0, "heisenberg_oracle_k": 2, "claimed_k": 1})
    rep.add("[T2, T1] vertical", pi_star_exact(C).is_identity())
    rep.add("[T0, T1] = I", (T0 @ T1 @ T0.inverse() @ T1.inverse()) == ExactMatrix.identity(ctx.d))
    rep.add("[T0, T2] = I", (T0 @ T2 @ T0.inverse() @ T2.inverse()) == ExactMatrix.identity(ctx.d))
    return rep


@dataclass
class Certificate:
    d: int
    case: str
    sections: dict[str, Report]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.sections.values())

    def to_json(self) -> dict:
        checks = []
        for sec, rep in self.sections.items():
            for c in rep.to_json():
                checks.append({"section": sec, **c})
        return {
            "d": self.d,
            "case": self.case,
            "status": "pass" if self.ok else "fail",
            "checks": checks,
            "claimed_index": CLAIMED_INDEX[self.d],
            "claimed_index_note": "reported from the literature, not verified by enumeration",
        }


def certify_reflective(d: int) -> Certificate:
    ctx = build_context(d)
    return Certificate(
        d,
        ctx.case,
        {
            "generators": verify_generators(ctx),
            "sigma_family": verify_sigma_family(ctx),
            "commutators": verify_commutator_relations(ctx),
        },
    )
