from fractions import Fraction as F
import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from polarity_kit.extarith import INF, NEG_INF
from polarity_kit.geometry import (
    ConvexBody,
    EmptyPolarWarning,
    NotBipolarError,
    bipolar_set,
    cross_polytope,
    exposed_face,
    exposed_face_contains,
    hull_with_origin,
    is_bipolar_set,
    minkowski_eval,
    normal_cone_contains,
    polar_cone,
    polar_set,
    set_join,
    set_meet,
    square,
    support_eval,
)
from polarity_kit.instances import random_bipolar_polytope, random_generator_set

SQ = square()
CR = cross_polytope()


def test_body_basics():
    assert SQ.contains((1, 1)) and SQ.contains((F(1, 2), -1))
    assert not SQ.contains((F(11, 10), 0))
    assert CR.contains((F(1, 2), F(1, 2)))
    assert not CR.contains((F(1, 2), F(3, 5)))
    assert ConvexBody.empty(2).is_empty
    assert ConvexBody.whole_space(2).contains((10**6, -(10**6)))
    assert square(dim=3).exact is False


def test_constraint_and_generator_forms_agree():
    hs = ConvexBody.from_halfspaces([((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])
    assert hs == SQ
    assert sorted(hs.points) == sorted(SQ.points)


@pytest.mark.parametrize("body, x, expected", [
    (CR, (2, 1), 2),
    (SQ, (2, 1), 3),
    (SQ, (0, 0), 0),
])
def test_support(body, x, expected):
    assert support_eval(body, x) == expected


def test_support_special_values():
    assert support_eval(ConvexBody.empty(2), (1, 1)) == NEG_INF
    quadrant = ConvexBody.from_points([(0, 0)], rays=[(1, 0), (0, 1)])
    assert support_eval(quadrant, (1, 0)) == INF
    assert support_eval(quadrant, (-1, -2)) == 0


@pytest.mark.parametrize("body, x, expected", [
    (SQ, (2, 1), 2),
    (CR, (2, 1), 3),
    (SQ, (0, 0), 0),
    (CR, (F(1, 3), F(-1, 3)), F(2, 3)),
])
def test_gauge(body, x, expected):
    assert minkowski_eval(body, x) == expected


def test_gauge_special_values():
    # origin on the boundary: gauge is infinite off the cone
    tri = ConvexBody.from_points([(0, 0), (1, 0), (0, 1)])
    assert minkowski_eval(tri, (-1, 0)) == INF
    assert minkowski_eval(tri, (1, 1)) == 2
    assert minkowski_eval(ConvexBody.whole_space(2), (5, 5)) == 0
    assert minkowski_eval(ConvexBody.origin(2), (0, 1)) == INF
    assert minkowski_eval(ConvexBody.origin(2), (0, 0)) == 0


def test_exposed_face_of_square_is_an_edge():
    face = exposed_face(SQ, (1, 0))
    assert face == ConvexBody.from_points([(1, -1), (1, 1)])
    assert exposed_face_contains(SQ, (1, 0), (1, F(1, 3)))
    assert not exposed_face_contains(SQ, (1, 0), (F(1, 2), 0))
    assert exposed_face(SQ, (1, 1)) == ConvexBody.from_points([(1, 1)])
    assert exposed_face(SQ, (0, 0)) == SQ


def test_normal_cone_examples():
    assert normal_cone_contains(SQ, (1, 1), (2, 3))
    assert not normal_cone_contains(SQ, (1, 1), (-1, 3))
    assert normal_cone_contains(SQ, (1, 0), (1, 0))
    assert not normal_cone_contains(SQ, (1, 0), (1, F(1, 10)))
    assert normal_cone_contains(SQ, (0, 0), (0, 0))
    assert not normal_cone_contains(SQ, (0, 0), (1, 0))
    with pytest.raises(ValueError):
        normal_cone_contains(SQ, (2, 0), (1, 0))


def test_polar_of_square_is_cross_and_back():
    assert polar_set(SQ) == CR
    assert polar_set(CR) == SQ
    assert polar_set(square(2)) == cross_polytope(F(1, 2))


def test_polar_of_ray_cone_is_halfplane():
    ray = ConvexBody.from_points([(0, 0)], rays=[(1, 0)])
    assert polar_set(ray) == ConvexBody.from_halfspaces([((1, 0), 0)])
    assert polar_cone(ray) == ConvexBody.from_halfspaces([((1, 0), 0)])


def test_polar_cone_of_quadrant():
    quadrant = ConvexBody.from_points([(0, 0)], rays=[(1, 0), (0, 1)])
    third = ConvexBody.from_points([(0, 0)], rays=[(-1, 0), (0, -1)])
    assert polar_cone(quadrant) == third


def test_polar_of_origin_and_empty():
    assert polar_set(ConvexBody.origin(2)) == ConvexBody.whole_space(2)
    assert polar_set(ConvexBody.whole_space(2)) == ConvexBody.origin(2)
    with pytest.warns(EmptyPolarWarning):
        assert polar_set(ConvexBody.empty(2)) == ConvexBody.whole_space(2)


def test_bipolar_of_segment_is_triangle():
    seg = ConvexBody.from_points([(1, 0), (0, 1)])
    tri = ConvexBody.from_points([(0, 0), (1, 0), (0, 1)])
    assert bipolar_set(seg) == tri
    assert not is_bipolar_set(seg)
    assert is_bipolar_set(tri)


def test_meet_and_join():
    a = ConvexBody.from_points([(0, 0), (2, 0)])
    b = ConvexBody.from_points([(0, 0), (0, 2)])
    assert set_meet(a, b) == ConvexBody.origin(2)
    assert set_join(a, b) == ConvexBody.from_points([(0, 0), (2, 0), (0, 2)])
    assert set_meet(SQ, CR) == CR
    assert set_join(SQ, CR) == SQ
    with pytest.raises(NotBipolarError):
        set_meet(SQ, ConvexBody.from_points([(1, 1), (2, 2)]))


def test_scaled_and_json():
    assert SQ.scaled(2) == square(2)
    j = CR.to_json()
    assert j["dim"] == 2


def test_float_mode_three_dimensions():
    cube = square(dim=3)
    octa = cross_polytope(dim=3)
    assert polar_set(cube) == octa
    assert support_eval(octa, (2, 1, 0.5)) == pytest.approx(2)
    assert minkowski_eval(cube, (0.5, -2, 0)) == pytest.approx(2)


# -- properties on random rational polytopes ---------------------------------

seeds = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_double_polar_is_hull_with_origin(seed):
    body = random_generator_set(random.Random(seed), max_points=6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyPolarWarning)
        assert polar_set(polar_set(body)) == hull_with_origin(body)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_gauge_of_polar_is_support(seed):
    rng = random.Random(seed)
    P = random_bipolar_polytope(rng)
    Po = polar_set(P)
    for _ in range(5):
        x = (F(rng.randint(-8, 8), 4), F(rng.randint(-8, 8), 4))
        assert minkowski_eval(Po, x) == support_eval(P, x)
        assert support_eval(Po, x) == minkowski_eval(P, x)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_polar_reverses_inclusion(seed):
    rng = random.Random(seed)
    P = random_bipolar_polytope(rng)
    Q = set_join(P, random_bipolar_polytope(rng))
    assert P <= Q
    assert polar_set(Q) <= polar_set(P)
    # polar of a join is the meet of polars
    R = random_bipolar_polytope(rng)
    assert polar_set(set_join(P, R)) == set_meet(polar_set(P), polar_set(R))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_face_points_are_normal_pairs(seed):
    rng = random.Random(seed)
    P = random_bipolar_polytope(rng)
    y = (F(rng.randint(-4, 4), 2), F(rng.randint(-4, 4), 2))
    for p in exposed_face(P, y).points:
        assert normal_cone_contains(P, p, y)
        assert exposed_face_contains(P, y, p)
