import math
from fractions import Fraction

import numpy as np
import pytest

from chyp.hermlin import SIEGEL, GeometryError
from chyp.heisenberg import (
    Fan,
    HeisPoint,
    HorosphericalPoint,
    InfiniteRCircle,
    anti_boundary_action,
    boundary_action,
    contact_form_eval,
    fan_leaf,
    fans_parallel,
    heis_from_lift,
    horizontal_slope,
    horospherical_coordinates,
    invariant_fan,
    is_infinite_rcircle,
    leaf_meeting,
    leaf_through,
    parabolics_commute_at_infinity,
    pi_star,
    polar_of_vertical_line,
    rcircle_fan_orthogonal,
    reflection_rcircle,
    standard_lift,
    translation_parameters,
    vertical_line_base,
)
from chyp.hermlin import inner
from chyp.isometry import (
    AntiIsometry,
    dilation,
    heis_rotation,
    heis_translation,
    parabolic_standard,
)


@pytest.fixture
def points(rng):
    return [HeisPoint.of(complex(*rng.normal(size=2)), rng.normal()) for _ in range(20)]


class TestGroupLaw:
    def test_example(self):
        p = HeisPoint.of(1, 0) * HeisPoint.of(1j, 0)
        assert p.z == 1 + 1j and p.t == -2

    def test_exact_rationals(self):
        a = HeisPoint(Fraction(1, 3), Fraction(1, 2), Fraction(0))
        b = HeisPoint(Fraction(2, 5), Fraction(-1, 7), Fraction(1))
        c = a * b
        assert c.t == 1 + 2 * (Fraction(1, 2) * Fraction(2, 5) - Fraction(1, 3) * Fraction(-1, 7))
        assert isinstance(c.t, Fraction)

    def test_associative_and_inverse(self, points):
        a, b, c = points[:3]
        assert ((a * b) * c).close_to(a * (b * c), 1e-12)
        assert (a * a.inverse()).close_to(HeisPoint.of(0, 0))

    def test_commutator_is_vertical(self, points):
        a, b = points[:2]
        comm = a * b * a.inverse() * b.inverse()
        assert abs(comm.z) < 1e-14
        assert comm.t == pytest.approx(4 * (a.z * b.z.conjugate()).imag)

    def test_matrix_action_matches_law(self, points):
        for a, b in zip(points[::2], points[1::2]):
            img = boundary_action(heis_translation(a.z, a.t), b)
            assert img.close_to(a * b, 1e-10)

    def test_json(self):
        p = HeisPoint.of(0.5 - 2j, 3.0)
        assert HeisPoint.from_json(p.to_json()).close_to(p, 0)
        with pytest.raises(GeometryError):
            HeisPoint.from_json({"z": [0, 0]})


class TestCoordinates:
    def test_lift_is_null(self, points):
        for p in points:
            Z = standard_lift(p)
            assert abs(inner(SIEGEL, Z, Z)) < 1e-12

    def test_round_trip(self, points):
        for p in points:
            assert heis_from_lift(3j * standard_lift(p)).close_to(p, 1e-12)

    def test_interior_height(self):
        h = HorosphericalPoint(0.3 + 0.1j, -1.0, 2.5)
        Z = standard_lift(h)
        assert inner(SIEGEL, Z, Z).real == pytest.approx(-2.5)
        back = horospherical_coordinates(Z)
        assert back.u == pytest.approx(2.5) and back.t == pytest.approx(-1.0)

    def test_infinity_has_none(self):
        with pytest.raises(GeometryError):
            horospherical_coordinates([1, 0, 0])

    def test_negative_height_rejected(self):
        with pytest.raises(GeometryError):
            HorosphericalPoint(0, 0, -1)


class TestStabilizer:
    def test_rotation_and_dilation(self):
        p = HeisPoint.of(1 + 1j, 2.0)
        r = boundary_action(heis_rotation(math.pi / 2), p)
        assert r.close_to(HeisPoint.of(-1 + 1j, 2.0), 1e-12)
        d = boundary_action(dilation(2.0), p)
        assert d.close_to(HeisPoint.of(2 + 2j, 8.0), 1e-12)
        with pytest.raises(GeometryError):
            boundary_action(dilation(2.0), p, allow_dilation=False)

    def test_pi_star(self):
        g = parabolic_standard(1 - 1j, 0.5, 0.7)
        f = pi_star(g)
        assert abs(f.rotation - np.exp(0.7j)) < 1e-12
        p = HeisPoint.of(0.3 + 0.2j, 1.0)
        assert abs(f(p.z) - boundary_action(g, p).z) < 1e-12
        with pytest.raises(GeometryError):
            pi_star(dilation(3.0))

    def test_translation_parameters(self):
        z, t = translation_parameters(heis_translation(2 - 1j, -3.0))
        assert abs(z - (2 - 1j)) < 1e-12 and t == pytest.approx(-3.0)

    def test_requires_fixing_infinity(self):
        M = np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]], dtype=complex)
        with pytest.raises(GeometryError):
            boundary_action(M, HeisPoint.of(0, 0))

    def test_standard_reflection(self):
        s0 = AntiIsometry.standard(SIEGEL)
        p = HeisPoint.of(1 + 2j, 3.0)
        assert anti_boundary_action(s0, p).close_to(HeisPoint.of(1 - 2j, -3.0), 1e-12)


class TestContact:
    def test_horizontal_fields(self, points):
        for p in points:
            assert contact_form_eval(p, (1, 0, 2 * float(p.y))) == pytest.approx(0, abs=1e-12)
            assert contact_form_eval(p, (0, 1, -2 * float(p.x))) == pytest.approx(0, abs=1e-12)
            assert contact_form_eval(p, (0, 0, 1)) == 1

    def test_sign_convention(self):
        # the kernel must contain d/dy - 2x d/dt, so (0, 1, 2) at [1, 0] is not horizontal
        p = HeisPoint.of(1, 0)
        assert contact_form_eval(p, (0, 1, -2)) == 0
        assert contact_form_eval(p, (0, 1, 2)) == 4

    def test_rcircle_detection(self, points):
        for p in points:
            u = np.exp(1j * float(p.t))
            assert is_infinite_rcircle(InfiniteRCircle(p, u, horizontal_slope(p, u)))
            assert not is_infinite_rcircle(InfiniteRCircle(p, u, horizontal_slope(p, u) + 0.1))
        assert not is_infinite_rcircle(InfiniteRCircle(points[0], 0, 1.0))

    def test_translations_preserve_rcircles(self, points):
        L = InfiniteRCircle(HeisPoint.of(0, 0), 1.0, 0.0)
        for a in points[:5]:
            g = heis_translation(a.z, a.t)
            q0, q1 = boundary_action(g, L.point(0)), boundary_action(g, L.point(1))
            image = InfiniteRCircle(q0, q1.z - q0.z, float(q1.t) - float(q0.t))
            assert is_infinite_rcircle(image)

    def test_reflection_rcircle_fixed(self):
        s0 = AntiIsometry.standard(SIEGEL)
        L = reflection_rcircle(s0)
        assert is_infinite_rcircle(L)
        for s in (-1.0, 0.5, 2.0):
            p = L.point(s)
            assert anti_boundary_action(s0, p).close_to(p, 1e-12)


class TestFans:
    def test_invariant_fan(self):
        F = invariant_fan(heis_translation(2j, 4.0))
        assert abs(F.w - 1j) < 1e-12 and F.k == pytest.approx(0.5)
        assert F.at_infinity

    def test_invariant_fan_rejects_vertical(self):
        with pytest.raises(GeometryError):
            invariant_fan(heis_translation(0, 1.0))

    def test_translation_preserves_leaves(self):
        z, t = 1 + 1j, 3.0
        g = heis_translation(z, t)
        F = invariant_fan(g)
        L = fan_leaf(F, 0.7)
        assert is_infinite_rcircle(L)
        for s in (-1.0, 0.0, 2.5):
            img = boundary_action(g, L.point(s))
            assert leaf_through(F, img) == pytest.approx(0.7)

    def test_parallel(self):
        assert fans_parallel(Fan(1, 0), Fan(-1, 3))
        assert not fans_parallel(Fan(1, 0), Fan(1j, 0))

    def test_orthogonality(self):
        F = Fan(1, 0.5)
        L = InfiniteRCircle(HeisPoint.of(0, 0), 1j, 0.0)
        assert rcircle_fan_orthogonal(L, F)
        M = InfiniteRCircle(HeisPoint.of(0, 0), np.exp(0.3j), 0.0)
        assert not rcircle_fan_orthogonal(M, F)
        with pytest.raises(GeometryError):
            rcircle_fan_orthogonal(InfiniteRCircle(HeisPoint.of(0, 0), 1, 0.0), F)

    def test_leaf_meeting(self):
        F = Fan(1, 0.5)
        L = InfiniteRCircle(HeisPoint.of(2, 1.0), 1j, horizontal_slope(HeisPoint.of(2, 1.0), 1j))
        t0, p = leaf_meeting(L, F)
        assert p.y == pytest.approx(0.5)
        assert leaf_through(F, p) == pytest.approx(t0)

    def test_json(self):
        F = Fan(1j, -2.0)
        G = Fan.from_json(F.to_json())
        assert G.w == F.w and G.k == F.k
        with pytest.raises(GeometryError):
            Fan(2, 0)


class TestCommuting:
    def test_3step(self):
        a, b, c = heis_translation(1, 0), heis_translation(2, 5.0), heis_translation(1j, 0)
        assert parabolics_commute_at_infinity(a, b) == (True, True)
        assert parabolics_commute_at_infinity(a, c) == (False, False)

    def test_2step_central(self):
        v = heis_translation(0, 1.0)
        for g in (heis_translation(1j, 0), parabolic_standard(0, 1.0, 0.5)):
            assert parabolics_commute_at_infinity(v, g) == (True, True)

    def test_screw(self):
        a = parabolic_standard(0, 1.0, 0.5)
        b = parabolic_standard(0, 2.0, 1.3)
        c = heis_translation(1, 0) @ parabolic_standard(0, 1.0, 0.5) @ heis_translation(-1, 0)
        assert parabolics_commute_at_infinity(a, b) == (True, True)
        assert parabolics_commute_at_infinity(a, c) == (False, False)

    def test_rejects_non_parabolic(self):
        with pytest.raises(GeometryError):
            parabolics_commute_at_infinity(dilation(2.0), heis_translation(1, 0))


class TestVerticalLines:
    def test_polar_round_trip(self):
        for a in (0, 1 - 2j, 3j):
            c = polar_of_vertical_line(a)
            assert inner(SIEGEL, c, c).real > 0
            assert vertical_line_base(c) == pytest.approx(a)
            assert abs(inner(SIEGEL, standard_lift(HeisPoint.of(a, 1.7)), c)) < 1e-12
