from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from polarity_kit.extarith import INF, NEG_INF
from polarity_kit.funcrep import (
    GenIndicator,
    Grid,
    Indicator,
    MaxAffine,
    MinkowskiOf,
    OffGridError,
    Pointwise,
    Sampled,
    SupportOf,
    Valley,
    effective_domain,
    level_curve,
    level_set,
    sample,
    shifted,
    strict_level_set,
    support_as_max_affine,
)
from polarity_kit.geometry import ConvexBody, cross_polytope, square


def test_grid_snaps_origin_onto_a_node():
    g = Grid([(-1, 1, 4)])  # naive nodes -1, -1/3, 1/3, 1
    assert g.origin_index is not None
    assert g.steps == (F(2, 3),)
    assert (0,) in g


def test_regular_grid_nodes_and_index():
    g = Grid.regular(-1, 1, F(1, 2), dim=2)
    assert g.shape == (5, 5)
    assert g.nodes[0] == (-1, -1)
    assert g.nodes[1] == (-1, F(-1, 2))  # last axis fastest
    for i, x in enumerate(g.nodes):
        assert g.index(x) == i
    assert g.index((F(1, 3), 0)) is None
    assert g.node_array().shape == (25, 2)


def test_coarsened_grid():
    g = Grid.regular(-3, 3, F(1, 2))
    c = g.coarsened(2)
    assert c.steps == (1,)
    assert c.axis(0) == [-3, -2, -1, 0, 1, 2, 3]
    odd = Grid.regular(-1, 2, F(1, 2)).coarsened(2)
    assert odd.axis(0)[0] == -1 and odd.axis(0)[-1] == 2


def test_invalid_grids():
    with pytest.raises(ValueError):
        Grid([(0, 1, 1)])
    with pytest.raises(ValueError):
        Grid([(1, 0, 3)])
    with pytest.raises(ValueError):
        Grid([])


def test_sampled_refuses_off_grid_queries():
    g = Grid.regular(-1, 1, F(1, 2))
    s = sample(SupportOf(ConvexBody.from_points([(-1,), (1,)])), g)
    assert s((F(1, 2),)) == F(1, 2)
    with pytest.raises(OffGridError):
        s((F(1, 3),))
    with pytest.raises(ValueError):
        Sampled(g, [0, 1])


def test_closed_forms():
    sq = square()
    assert Indicator(sq)((1, 0)) == 0 and Indicator(sq)((2, 0)) == INF
    assert GenIndicator(sq)((1, 0)) == 1 and GenIndicator(sq)((2, 0)) == INF
    assert Valley(sq)((0, 0)) == NEG_INF and Valley(sq)((0, 3)) == INF
    assert SupportOf(sq)((2, 1)) == 3
    assert MinkowskiOf(sq)((2, 1)) == 2
    f = MaxAffine([((1, 0), 0), ((-1, 0), 0)])
    assert f((-3, 7)) == 3
    assert MaxAffine([], domain=sq)((0, 0)) == NEG_INF
    assert MaxAffine([], domain=sq)((5, 0)) == INF
    assert Pointwise(lambda x: x[0] ** 2, 1)((3,)) == 9


def test_support_as_max_affine_with_rays():
    half = ConvexBody.from_points([(0, 0)], rays=[(1, 0)])
    m = support_as_max_affine(half)
    assert m((-2, 5)) == 0
    assert m((1, 0)) == INF
    g = Grid.regular(-1, 1, F(1, 2), dim=2)
    for x in g.nodes:
        assert m(x) == SupportOf(half)(x)


def test_shift():
    f = shifted(SupportOf(square()), 2)
    assert f((1, 0)) == 3
    assert isinstance(shifted(Indicator(square()), 1), GenIndicator)


def test_level_sets_exact():
    sq, cr = square(), cross_polytope()
    assert level_set(SupportOf(sq), 1) == cr
    assert level_set(SupportOf(cr), 2) == square(2)
    assert level_set(MinkowskiOf(sq), 3) == square(3)
    assert level_set(MinkowskiOf(sq), 0) == ConvexBody.origin(2)
    assert level_set(Indicator(sq), F(-1, 2)).is_empty
    assert level_set(GenIndicator(sq), 1) == sq
    assert level_set(Valley(sq), NEG_INF) == sq
    assert level_set(SupportOf(sq), INF) == ConvexBody.whole_space(2)
    with pytest.raises(ValueError):
        level_set(Pointwise(abs, 1), 1)


def test_level_sets_on_grids():
    g = Grid.regular(-2, 2, 1)
    f = Pointwise(lambda x: abs(x[0]), 1)
    assert level_set(f, 1, g) == {(-1,), (0,), (1,)}
    assert strict_level_set(f, 1, g) == {(0,)}
    assert level_curve(f, 2, g) == {(-2,), (2,)}


def test_effective_domain():
    sq = square()
    assert effective_domain(GenIndicator(sq)) == sq
    half = ConvexBody.from_points([(0, 0)], rays=[(1, 0)])
    assert effective_domain(SupportOf(half)) == ConvexBody.from_halfspaces([((1, 0), 0)])
    g = Grid.regular(-2, 2, 1)
    assert effective_domain(Indicator(ConvexBody.from_points([(-1,), (1,)])), g) == {
        (-1,), (0,), (1,)}


def test_float_sampling():
    g = Grid.regular(-1, 1, 0.5, dim=3, exact=False)
    s = sample(MinkowskiOf(square(dim=3)), g)
    assert s.values.dtype == float
    assert s((0.5, -1.0, 0.0)) == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=1, max_size=4))
def test_sampled_round_trip(vals):
    g = Grid.regular(-2, 2, F(1, 2))
    table = [vals[i % len(vals)] for i in range(g.size)]
    s = Sampled(g, table)
    for x, v in zip(g.nodes, table):
        assert s(x) == v
    assert sample(s, g) is s
