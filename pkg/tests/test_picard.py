import json
from fractions import Fraction

import pytest

from chyp.hermlin import GeometryError
from chyp.picard import (
    SUPPORTED_D,
    ExactMatrix,
    QuadFieldScalar,
    build_context,
    certify_reflective,
    exact_entries_in_Od,
    exact_su21_check,
    heis_translation_exact,
    od_member,
    pi_star_exact,
    q,
    translation_directions,
    unit_reflection,
    verify_commutator_relations,
)

# [T2, T1] is vertical of size 4 Im(z2 conj z1); T0 has t = sqrt(d)
EXPECTED_K = {1: 16, 2: 8, 3: 4, 7: 4, 11: 4}
# corner -|z|^2/2 + i m sqrt(d)/4 lies in O_d: parity forces m = 2 when d = 3 mod 4
EXPECTED_M = {1: 0, 2: 0, 3: 2, 7: 2, 11: 2}


@pytest.fixture(params=SUPPORTED_D)
def d(request):
    return request.param


class TestScalars:
    def test_field_arithmetic(self):
        x, y = q(1, 2, 3), q(Fraction(1, 2), -1, 3)
        assert x * y == q(Fraction(1, 2) + 6, -1 + 1, 3)
        assert (x / y) * y == x
        assert x.norm() == 1 + 3 * 4
        assert x.conj() == q(1, -2, 3)
        assert x ** 0 == QuadFieldScalar.of(1, 3)
        assert x ** -1 * x == QuadFieldScalar.of(1, 3)

    def test_complex(self):
        assert complex(q(1, 1, 2)) == pytest.approx(1 + 1.4142135623730951j)

    def test_rejects_bad_field(self):
        with pytest.raises(ValueError):
            q(1, 1, 4)
        with pytest.raises(ValueError):
            q(1, 0, 2) + q(1, 0, 3)
        with pytest.raises(ZeroDivisionError):
            q(0, 0, 2).inv()

    @pytest.mark.parametrize(
        "x, member",
        [
            (q(Fraction(1, 2), Fraction(1, 2), 3), True),
            (q(Fraction(1, 2), 0, 3), False),
            (q(Fraction(1, 2), Fraction(1, 2), 7), True),
            (q(Fraction(1, 2), Fraction(1, 2), 1), False),
            (q(3, -2, 2), True),
            (q(0, Fraction(1, 2), 2), False),
        ],
    )
    def test_ring_of_integers(self, x, member):
        assert od_member(x) is member


class TestMatrices:
    def test_inverse_and_det(self):
        M = heis_translation_exact(q(1, 1, 2), 4)
        assert M @ M.inverse() == ExactMatrix.identity(2)
        assert M.det() == QuadFieldScalar.of(1, 2)

    def test_translation_in_su21(self, d):
        for m in (0, 2, -6):
            assert exact_su21_check(heis_translation_exact(q(1, 1, d), m))

    def test_to_numpy_matches(self):
        M = heis_translation_exact(q(1, 1, 3), 2)
        N = M.to_numpy()
        assert N[0, 2] == pytest.approx(complex(M[0, 2]))

    def test_pi_star(self):
        M = heis_translation_exact(q(2, 0, 1), 0)
        f = pi_star_exact(M)
        assert f(q(0, 1, 1)) == q(2, 1, 1)
        with pytest.raises(GeometryError):
            pi_star_exact(ExactMatrix.of([[0, 0, 1], [0, -1, 0], [1, 0, 0]], 1))


class TestContext:
    def test_unsupported(self):
        with pytest.raises(GeometryError):
            build_context(5)

    def test_minimal_lifts(self, d):
        ctx = build_context(d)
        for name in ("T1", "T2"):
            assert abs(ctx.lifts[name].m) == EXPECTED_M[d]
            assert exact_entries_in_Od(ctx.lifts[name].matrix)

    def test_directions_orthogonal(self, d):
        z1, z2 = translation_directions(d)
        assert (z1 * z2.conj()).a == 0

    def test_generators(self, d):
        ctx = build_context(d)
        for name, M in ctx.generators.items():
            assert exact_su21_check(M), name
        assert not exact_entries_in_Od(ctx.generators["T0"])

    def test_unit_reflection(self):
        assert unit_reflection(2) is None
        U1 = unit_reflection(1)
        assert exact_su21_check(U1)
        U3 = unit_reflection(3)
        chk = exact_su21_check(U3)
        assert chk.form_preserved and chk.det_is_unit and not chk.det_is_one


class TestCommutators:
    def test_measured_k(self, d):
        rep = verify_commutator_relations(build_context(d))
        w = rep.checks[0].witness
        assert w["k"] == EXPECTED_K[d]
        assert w["agrees_with_oracle"]

    def test_original_case_I_pair(self):
        rep = verify_commutator_relations(build_context(3))
        w = next(c.witness for c in rep.checks if "T2'" in c.name)
        assert w["k"] == 2


class TestCertificate:
    def test_all_pass(self, d):
        cert = certify_reflective(d)
        assert cert.ok, [n for r in cert.sections.values() for n in r.failures()]

    def test_json_deterministic(self):
        a = json.dumps(certify_reflective(7).to_json(), sort_keys=True)
        b = json.dumps(certify_reflective(7).to_json(), sort_keys=True)
        assert a == b
        out = json.loads(a)
        assert out["status"] == "pass" and out["case"] == "I"
        assert {c["section"] for c in out["checks"]} == {"generators", "sigma_family", "commutators"}
