import numpy as np
import pytest

from chyp.hermlin import (
    BALL,
    CUBE_ROOTS_OF_UNITY,
    SIEGEL,
    FormError,
    Location,
    Model,
    ToleranceConfig,
    cayley,
    cubic_roots,
    eigensystem,
    inner,
    locate,
    matrix_from_json,
    matrix_to_json,
    polar_vector,
    projectively_equal,
    su_normalize,
)
from chyp.isometry import elliptic_standard, heis_translation_matrix


class TestForms:
    def test_builtin_matrices(self):
        assert np.array_equal(BALL.matrix, np.diag([1.0, 1.0, -1.0]))
        assert np.array_equal(SIEGEL.matrix, [[0, 0, 1], [0, 1, 0], [1, 0, 0]])

    @pytest.mark.parametrize("f", [BALL, SIEGEL])
    def test_hermitian_signature(self, f):
        assert np.array_equal(f.matrix, f.matrix.conj().T)
        assert sorted(np.sign(np.linalg.eigvalsh(f.matrix))) == [-1, 1, 1]

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            ToleranceConfig(eq_tol=0)


class TestInner:
    def test_siegel_antidiagonal(self):
        assert inner(SIEGEL, [1, 0, 0], [0, 0, 1]) == 1

    def test_ball_center(self):
        assert inner(BALL, [0, 0, 1], [0, 0, 1]) == -1

    def test_standard_lift_pairing(self):
        assert inner(SIEGEL, [-0.5, 1, 1], [1, 0, 0]) == 1


class TestLocate:
    def test_examples(self):
        assert locate(BALL, [0, 0, 1]) is Location.INTERIOR
        assert locate(SIEGEL, [1, 0, 0]) is Location.BOUNDARY
        assert locate(BALL, [1, 0, 0]) is Location.EXTERIOR

    def test_scale_invariant(self):
        assert locate(BALL, [0, 0, 1e-6]) is Location.INTERIOR


class TestCubicRoots:
    def test_triple_root(self):
        np.testing.assert_allclose(cubic_roots(-3, 3, -1), [1, 1, 1], atol=1e-12)

    def test_roots_of_unity(self):
        roots = sorted(cubic_roots(0, 0, -1), key=np.angle)
        np.testing.assert_allclose(roots, sorted(CUBE_ROOTS_OF_UNITY, key=np.angle), atol=1e-14)

    def test_distinct_real(self):
        np.testing.assert_allclose(sorted(np.real(cubic_roots(-3.5, 3.5, -1))), [0.5, 1, 2], atol=1e-13)

    def test_random_against_numpy(self, rng):
        for _ in range(200):
            c = rng.normal(size=3) + 1j * rng.normal(size=3)
            ours = np.sort_complex(np.array(cubic_roots(*c)))
            ref = np.sort_complex(np.roots([1, *c]))
            np.testing.assert_allclose(ours, ref, atol=1e-9)


class TestEigensystem:
    def test_identity(self):
        es = eigensystem(np.eye(3))
        np.testing.assert_allclose(es.eigenvalues, [1, 1, 1])
        assert es.deficiency == 0

    def test_diagonal(self):
        es = eigensystem(np.diag([2, 1, 0.5]))
        for lam, v in es.pairs:
            k = int(np.argmax(np.abs(v)))
            assert abs(lam - [2, 1, 0.5][k]) < 1e-12

    def test_heisenberg_translation_is_defective(self):
        es = eigensystem(heis_translation_matrix(1, 0))
        np.testing.assert_allclose(es.eigenvalues, [1, 1, 1], atol=1e-9)
        assert es.deficiency == 2
        (cluster,) = es.clusters
        assert projectively_equal(cluster.vectors[:, 0], [1, 0, 0])


class TestSUNormalize:
    def test_identity(self):
        np.testing.assert_allclose(su_normalize(np.eye(3), BALL), np.eye(3))

    def test_scaled_identity_rejected(self):
        with pytest.raises(FormError):
            su_normalize(2 * np.eye(3), BALL)

    def test_dilation_unchanged(self):
        D = np.diag([2, 1, 0.5])
        np.testing.assert_allclose(su_normalize(D, SIEGEL), D)


class TestPolar:
    def test_ball(self):
        assert projectively_equal(polar_vector([0, 0, 1], [1, 0, 1], BALL), [0, 1, 0])

    def test_siegel(self):
        assert projectively_equal(polar_vector([1, 0, 0], [0, 0, 1], SIEGEL), [0, 1, 0])

    def test_orthogonal(self, form, rng):
        for _ in range(20):
            p, q = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
            v = polar_vector(p, q, form)
            assert abs(inner(form, p, v)) < 1e-10 and abs(inner(form, q, v)) < 1e-10


class TestCayley:
    def test_center_stays_interior(self):
        z = cayley(np.array([0, 0, 1.0]), Model.BALL)
        assert locate(SIEGEL, z) is Location.INTERIOR

    def test_round_trip(self, rng):
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        back = cayley(cayley(M, Model.BALL, "holo"), Model.SIEGEL, "holo")
        np.testing.assert_allclose(back, M, atol=1e-12)

    def test_spectrum_preserved(self):
        E = elliptic_standard(0.7, -0.7)
        S = cayley(E.lift, Model.BALL, "holo")
        np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(S)), np.sort_complex(np.linalg.eigvals(E.lift)), atol=1e-12)
        assert np.allclose(S.conj().T @ SIEGEL.matrix @ S, SIEGEL.matrix)


def test_matrix_json_round_trip(rng):
    M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_array_equal(matrix_from_json(matrix_to_json(M)), M)
