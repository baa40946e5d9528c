"""Hermitian linear algebra on C^{2,1}.

Everything in the package is built on two fixed Hermitian forms of
signature (2,1): the ball form ``diag(1, 1, -1)`` and the Siegel form
given by the antidiagonal matrix.  Vectors and matrices are plain numpy
arrays of dtype ``complex128``.

Conventions
-----------
The Hermitian product is linear in the first slot::

    inner(form, X, Y) = Y^* H X

Model change uses the fixed real matrix::

    C = 1/sqrt(2) * [[1, 0, -1],
                     [0, sqrt(2), 0],
                     [1, 0, 1]]

which satisfies ``C^T H_siegel C = H_ball``.  Ball vectors map to Siegel
vectors by ``v -> C v`` and holomorphic matrices by ``A -> C A C^-1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Model(Enum):
    BALL = "ball"
    SIEGEL = "siegel"


class Location(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class GeometryError(ValueError):
    """Raised when an input violates the precondition of an operation."""


class FormError(GeometryError):
    """Raised when a matrix does not preserve the Hermitian form, or
    when operands live on different forms."""


@dataclass(frozen=True)
class ToleranceConfig:
    eq_tol: float = 1e-9
    boundary_tol: float = 1e-8
    angle_tol: float = 1e-9

    def __post_init__(self):
        for name in ("eq_tol", "boundary_tol", "angle_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True, eq=False)
class HermitianForm:
    matrix: np.ndarray
    model: Model

    def __eq__(self, other):
        return isinstance(other, HermitianForm) and self.model == other.model

    def __hash__(self):
        return hash(self.model)

    def __repr__(self):
        return f"HermitianForm({self.model.name})"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


BALL = HermitianForm(_frozen(np.diag([1.0, 1.0, -1.0])), Model.BALL)
SIEGEL = HermitianForm(
    _frozen([[0, 0, 1], [0, 1, 0], [1, 0, 0]]), Model.SIEGEL
)


def form_for(model: Model | str) -> HermitianForm:
    if isinstance(model, str):
        model = Model(model.lower())
    return BALL if model is Model.BALL else SIEGEL


def as_vector(X) -> np.ndarray:
    v = np.asarray(X, dtype=complex).reshape(-1)
    if v.shape != (3,):
        raise GeometryError(f"expected a vector of length 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise GeometryError("vector has non-finite entries")
    return v


def as_matrix(M) -> np.ndarray:
    m = np.asarray(M, dtype=complex)
    if m.shape != (3, 3):
        raise GeometryError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise GeometryError("matrix has non-finite entries")
    return m


def inner(form: HermitianForm, X, Y) -> complex:
    """Hermitian product <X, Y> = Y^* H X."""
    return complex(np.conj(Y) @ form.matrix @ X)


def norm2(form: HermitianForm, X) -> float:
    """The real number <X, X>."""
    return inner(form, X, X).real


def unit(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    n = np.linalg.norm(X)
    if n == 0:
        raise GeometryError("zero vector has no projective class")
    return X / n


# ---------------------------------------------------------------------------
# points


def locate(form: HermitianForm, Z, tol: ToleranceConfig = DEFAULT_TOL) -> Location:
    Z = as_vector(Z)
    if np.linalg.norm(Z) == 0:
        raise GeometryError("zero vector has no projective class")
    q = norm2(form, unit(Z))
    if abs(q) <= tol.boundary_tol:
        return Location.BOUNDARY
    return Location.INTERIOR if q < 0 else Location.EXTERIOR


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of CP^2 with its location relative to a form.

    Build instances with :meth:`of`, which validates and caches the
    location tag.
    """

    representative: np.ndarray
    location: Location
    form: HermitianForm

    @classmethod
    def of(cls, Z, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL):
        Z = as_vector(Z)
        return cls(_frozen(Z), locate(form, Z, tol), form)

    def __repr__(self):
        return f"ProjectivePoint({np.round(self.representative, 6)}, {self.location.name})"


def projectively_equal(X, Y, tol: float = 1e-8) -> bool:
    """True when X and Y span the same complex line of C^3."""
    x, y = unit(X), unit(Y)
    return abs(abs(np.vdot(x, y)) - 1.0) <= tol


def normalized_lift(form: HermitianForm, X) -> np.ndarray:
    """Rescale X so that <X,X> = -1 (interior) or +1 (exterior).

    Null vectors are returned with unit Euclidean norm.
    """
    X = as_vector(X)
    q = norm2(form, X)
    if abs(q) <= 1e-14 * np.linalg.norm(X) ** 2:
        return unit(X)
    return X / math.sqrt(abs(q))


def cosh2_half_distance(form: HermitianForm, X, Y) -> float:
    """cosh^2(d/2) between two interior points."""
    return abs(inner(form, X, Y)) ** 2 / (norm2(form, X) * norm2(form, Y))


# ---------------------------------------------------------------------------
# cubic solver and eigenvectors

_OMEGA = cmath.exp(2j * math.pi / 3)
CUBE_ROOTS_OF_UNITY = (1.0 + 0j, _OMEGA, _OMEGA.conjugate())


def _cbrt_principal(z: complex) -> complex:
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3)


def cubic_roots(
    a2: complex, a1: complex, a0: complex, snap_rtol: float = 1e-13
) -> tuple[complex, complex, complex]:
    """Roots of X^3 + a2 X^2 + a1 X + a0.

    The cubic is depressed by ``X = Y - a2/3`` to ``Y^3 + pY + q``.  When
    p and q are real and the discriminant is positive the trigonometric
    form is used; otherwise Cardano's formula with the cube root chosen
    on the larger of the two resolvent branches, which avoids
    cancellation.  A near-triple root (p and q below round-off) collapses
    to the exact triple root; ``snap_rtol`` sets that threshold relative to
    the coefficient scale.  Each root then receives one Newton step,
    kept only when it lowers the residual.
    """
    coeffs = (complex(a2), complex(a1), complex(a0))
    if not all(cmath.isfinite(c) for c in coeffs):
        raise GeometryError("cubic coefficients must be finite")
    a2, a1, a0 = coeffs
    shift = a2 / 3
    p = a1 - a2 * a2 / 3
    q = 2 * a2 ** 3 / 27 - a2 * a1 / 3 + a0
    scale = max(1.0, abs(shift), abs(a1) ** 0.5, abs(a0) ** (1 / 3))

    if abs(p) <= snap_rtol * scale ** 2 and abs(q) <= snap_rtol * scale ** 3:
        ys = [0j, 0j, 0j]
    else:
        real_case = abs(p.imag) <= 1e-15 * scale ** 2 and abs(q.imag) <= 1e-15 * scale ** 3
        disc = -(4 * p.real ** 3 + 27 * q.real ** 2)
        if real_case and disc > 0 and p.real < 0:
            pr, qr = p.real, q.real
            m = 2 * math.sqrt(-pr / 3)
            arg = 3 * qr / (pr * m)
            theta = math.acos(max(-1.0, min(1.0, arg))) / 3
            ys = [complex(m * math.cos(theta - 2 * math.pi * k / 3)) for k in range(3)]
        else:
            s = cmath.sqrt(q * q / 4 + p ** 3 / 27)
            w = -q / 2 + s if abs(-q / 2 + s) >= abs(-q / 2 - s) else -q / 2 - s
            c = _cbrt_principal(w)
            if c == 0:
                ys = [0j, 0j, 0j]
            else:
                ys = []
                for k in range(3):
                    ck = c * CUBE_ROOTS_OF_UNITY[k]
                    ys.append(ck - p / (3 * ck))

    def poly(x):
        return ((x + a2) * x + a1) * x + a0

    def dpoly(x):
        return (3 * x + 2 * a2) * x + a1

    roots = []
    for y in ys:
        x = y - shift
        d = dpoly(x)
        if d != 0:
            x_new = x - poly(x) / d
            if abs(poly(x_new)) < abs(poly(x)):
                x = x_new
        roots.append(complex(x))
    return tuple(roots)


def characteristic_coefficients(M) -> tuple[complex, complex, complex]:
    """(a2, a1, a0) with det(XI - M) = X^3 + a2 X^2 + a1 X + a0."""
    M = as_matrix(M)
    tr = complex(np.trace(M))
    minors = (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        + M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
        + M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    )
    return -tr, complex(minors), -complex(np.linalg.det(M))


def _kernel(A: np.ndarray, dim_max: int, rtol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of A."""
    _, s, vh = np.linalg.svd(A)
    scale = max(1.0, s[0])
    dim = int(np.sum(s <= rtol * scale))
    dim = max(1, min(dim, dim_max))
    return vh[-dim:].conj().T


@dataclass(frozen=True, eq=False)
class EigenCluster:
    """One eigenvalue (with algebraic multiplicity) and its eigenspace."""

    value: complex
    multiplicity: int
    vectors: np.ndarray  # columns span the eigenspace

    @property
    def geometric_multiplicity(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: tuple[complex, ...]
    clusters: tuple[EigenCluster, ...]

    @property
    def pairs(self) -> list[tuple[complex, np.ndarray]]:
        out = []
        for c in self.clusters:
            for j in range(c.geometric_multiplicity):
                out.append((c.value, c.vectors[:, j]))
        return out

    @property
    def deficiency(self) -> int:
        return sum(c.multiplicity - c.geometric_multiplicity for c in self.clusters)


CLUSTER_RTOL = 1e-7
KERNEL_RTOL = 1e-6


def cluster_values(values, rtol: float = CLUSTER_RTOL) -> list[list[complex]]:
    groups: list[list[complex]] = []
    for v in values:
        for g in groups:
            ref = g[0]
            if abs(v - ref) <= rtol * max(1.0, abs(ref)):
                g.append(v)
                break
        else:
            groups.append([v])
    return groups


def eigensystem(M, roots=None, cluster_rtol: float = CLUSTER_RTOL) -> EigenSystem:
    """Eigenvalues from the characteristic cubic plus SVD kernels.

    Roots closer than ``cluster_rtol`` (relative) are merged before the
    kernel of ``M - lambda I`` is extracted, so defective eigenvalues report
    a single eigenspace of the right dimension.  Callers with better
    knowledge of the spectrum (e.g. determinant-one lifts) may pass
    precomputed ``roots``.
    """
    M = as_matrix(M)
    if roots is None:
        # coefficient round-off grows with the entries; widen the triple-root snap
        snap = 1e-13 * max(1.0, float(np.linalg.norm(M))) ** 2
        roots = cubic_roots(*characteristic_coefficients(M), snap_rtol=snap)
    clusters = []
    for group in cluster_values(roots, cluster_rtol):
        lam = complex(np.mean(group))
        vecs = _kernel(M - lam * np.eye(3), len(group), KERNEL_RTOL)
        clusters.append(EigenCluster(lam, len(group), vecs))
    return EigenSystem(tuple(roots), tuple(clusters))


# ---------------------------------------------------------------------------
# normalization, polar vectors, model change


def preserves_form(M, form: HermitianForm, tol: float = 1e-9) -> bool:
    """True when M^* H M is a positive multiple of H, relative to |det M|."""
    M = as_matrix(M)
    det = abs(np.linalg.det(M))
    if det == 0:
        return False
    Mn = M / det ** (1 / 3)
    err = np.linalg.norm(Mn.conj().T @ form.matrix @ Mn - form.matrix)
    return err <= tol * max(1.0, np.linalg.norm(Mn) ** 2)


def su_normalize(M, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Divide M by the principal cube root of det(M).

    Raises :class:`FormError` when M is not in U(2,1) for ``form``;
    positive rescalings of a unitary matrix are not accepted.
    """
    M = as_matrix(M)
    det = complex(np.linalg.det(M))
    if det == 0:
        raise FormError("singular matrix")
    # already-normalized lifts are kept bit for bit so JSON round trips are exact
    N = M.copy() if abs(det - 1) <= 1e-14 else M / _cbrt_principal(det)
    err = np.linalg.norm(N.conj().T @ form.matrix @ N - form.matrix)
    if err > tol.eq_tol * max(1.0, np.linalg.norm(N) ** 2) or abs(abs(det) - 1) > 1e-6:
        raise FormError("matrix does not preserve the Hermitian form")
    return N


def polar_vector(p, q, form: HermitianForm, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """A vector orthogonal to both p and q for the form.

    Uses ``v = H^-1 conj(P x Q)``; when ``<v,v> > 0`` it is scaled to
    ``<v,v> = 1``.
    """
    P = as_vector(p.representative if isinstance(p, ProjectivePoint) else p)
    Q = as_vector(q.representative if isinstance(q, ProjectivePoint) else q)
    if projectively_equal(P, Q, tol.boundary_tol):
        raise GeometryError("points coincide projectively")
    v = np.linalg.solve(form.matrix, np.conj(np.cross(P, Q)))
    n = norm2(form, v)
    if n > 0:
        return v / math.sqrt(n)
    return unit(v)


_S = 1 / math.sqrt(2)
CAYLEY = _frozen([[_S, 0, -_S], [0, 1, 0], [_S, 0, _S]])
CAYLEY_INV = _frozen(np.linalg.inv(CAYLEY))


def cayley(obj, source: Model | str, kind: str = "auto") -> np.ndarray:
    """Change model.  ``source`` names the model the input is written in.

    ``kind`` is ``"vector"``, ``"holo"`` (conjugation by C) or ``"anti"``
    (Souriau lifts, ``M -> C M conj(C)^-1``; C is real so this matches
    the holomorphic rule).  ``"auto"`` picks vector or holo by shape.
    """
    if isinstance(source, str):
        source = Model(source.lower())
    a = np.asarray(obj, dtype=complex)
    fwd, back = (CAYLEY, CAYLEY_INV) if source is Model.BALL else (CAYLEY_INV, CAYLEY)
    if kind == "auto":
        kind = "vector" if a.ndim == 1 else "holo"
    if kind == "vector":
        return fwd @ as_vector(a)
    return fwd @ as_matrix(a) @ back


def other_model(model: Model) -> Model:
    return Model.SIEGEL if model is Model.BALL else Model.BALL


# ---------------------------------------------------------------------------
# JSON helpers


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2 and all(
        isinstance(x, (int, float)) for x in obj
    ):
        return complex(obj[0], obj[1])
    raise GeometryError(f"malformed complex scalar: {obj!r}")


def matrix_to_json(M) -> list[list[float]]:
    return [complex_to_json(z) for z in as_matrix(M).reshape(-1)]


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != 9:
        raise GeometryError("matrix must be a row-major list of 9 complex scalars")
    return np.array([complex_from_json(x) for x in obj], dtype=complex).reshape(3, 3)


def vector_to_json(v) -> list[list[float]]:
    return [complex_to_json(z) for z in as_vector(v)]


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != 3:
        raise GeometryError("vector must be a list of 3 complex scalars")
    return np.array([complex_from_json(x) for x in obj], dtype=complex)


def form_to_json(form: HermitianForm) -> dict:
    return {"model": form.model.value}


def form_from_json(obj) -> HermitianForm:
    if not isinstance(obj, dict) or obj.get("model") not in ("ball", "siegel"):
        raise GeometryError("form must be {'model': 'ball'|'siegel'}")
    return form_for(obj["model"])
