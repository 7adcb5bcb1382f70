from fractions import Fraction as F
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarity_kit.extarith import INF, NEG_INF
from polarity_kit.funcrep import (
    GenIndicator,
    Grid,
    Indicator,
    MinkowskiOf,
    Pointwise,
    Sampled,
    SupportOf,
    sample,
)
from polarity_kit.geometry import ConvexBody, cross_polytope, polar_set, square
from polarity_kit.instances import random_bipolar_polytope
from polarity_kit.transforms import (
    TABLE_ROWS,
    NegativeValueError,
    UnsupportedFunction,
    bipolar_transform,
    conjugate_zero_level_set,
    fenchel_conjugate_exact,
    fenchel_conjugate_grid,
    fenchel_subdifferential_grid,
    lambda_interval,
    polar_exact,
    polar_general_inf,
    polar_general_inf_grid,
    polar_inequality_check,
    polar_nonneg_sup,
    table_row,
    verify_table_row,
)

G101 = Grid.regular(-1, 1, 1)
SEG = ConvexBody.from_points([(-1,), (1,)])


# -- independent reference implementations (plain loops over nodes) ---------

def brute_conjugate(f, primal, y):
    best = NEG_INF
    for x in primal.nodes:
        v = f(x)
        if v == NEG_INF:
            return INF
        if v == INF:
            continue
        best = max(best, sum(a * b for a, b in zip(x, y)) - v)
    return best


def brute_polar(f, primal, y):
    """Exact inf over lam, by splitting on the sign of f(x) and <x, y>."""
    lo, hi = F(0), INF
    for x in primal.nodes:
        s = sum(a * b for a, b in zip(x, y))
        v = f(x)
        if v == INF:
            continue
        if v == NEG_INF:
            return INF
        if v > 0 and s > 0:
            lo = max(lo, s / v)
        elif v == 0 and s > 0:
            return INF
        elif v < 0:
            if s >= 0:
                return INF
            hi = min(hi, s / v)
    return lo if lo <= hi else INF


def test_conjugate_of_interval_indicator_is_abs():
    out = fenchel_conjugate_grid(Indicator(SEG), G101, G101)
    assert list(out.values) == [1, 0, 1]


def test_conjugate_of_square_function_at_one():
    sq = Pointwise(lambda x: x[0] ** 2, 1)
    out = fenchel_conjugate_grid(sq, G101, G101)
    assert out((1,)) == 0
    assert out((0,)) == 0


def test_conjugate_conventions():
    g = Grid.regular(-1, 1, F(1, 2))
    neg = Sampled(g, [NEG_INF if x == (0,) else 5 for x in g.nodes])
    assert all(v == INF for v in fenchel_conjugate_grid(neg, g).values)
    top = Sampled(g, [INF] * g.size)
    assert all(v == NEG_INF for v in fenchel_conjugate_grid(top, g).values)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.one_of(st.just(INF), st.integers(-4, 4).map(F)), min_size=9, max_size=9),
       st.integers(-4, 4))
def test_grid_conjugate_matches_loop(values, yi):
    g = Grid.regular(-2, 2, F(1, 2))
    f = Sampled(g, values)
    y = (F(yi, 2),)
    dual = Grid.regular(-2, 2, F(1, 2))
    assert fenchel_conjugate_grid(f, dual)(y) == brute_conjugate(f, g, y)


def test_closed_form_conjugates():
    sq, cr = square(), cross_polytope()
    assert isinstance(fenchel_conjugate_exact(SupportOf(sq)), Indicator)
    assert fenchel_conjugate_exact(MinkowskiOf(sq)).body == cr
    c = fenchel_conjugate_exact(GenIndicator(sq))
    assert c((1, 1)) == 1  # sigma_square(1,1) - 1
    with pytest.raises(UnsupportedFunction):
        fenchel_conjugate_exact(Pointwise(abs, 1))
    assert conjugate_zero_level_set(GenIndicator(sq)) == cr


def test_conjugate_grid_agrees_with_closed_form_on_nodes():
    g = Grid.regular(-2, 2, F(1, 2), dim=2)
    for f in (SupportOf(cross_polytope()), GenIndicator(square()), MinkowskiOf(square())):
        # the primal grid covers the body, so the grid max is attained
        grid_c = fenchel_conjugate_grid(f, Grid.regular(-1, 1, F(1, 2), dim=2), g)
        exact_c = fenchel_conjugate_exact(f)
        for y, v in grid_c.items():
            e = exact_c(y)
            if e < INF:
                assert v == e, (f, y)


def test_fenchel_subdifferential_of_abs_at_zero():
    g = Grid.regular(-2, 2, F(1, 2))
    f = Pointwise(lambda x: abs(x[0]), 1)
    sub = fenchel_subdifferential_grid(f, (0,), g, g)
    assert sub == {(-1,), (F(-1, 2),), (0,), (F(1, 2),), (1,)}
    assert fenchel_subdifferential_grid(f, (1,), g, g) == {(1,)}


@pytest.mark.parametrize("s, v, expected", [
    (1, INF, (0, INF)),
    (1, NEG_INF, None),
    (2, 4, (F(1, 2), INF)),
    (-2, 4, (0, INF)),
    (1, 0, None),
    (0, 0, (0, INF)),
    (0, -1, None),
    (-2, -4, (0, F(1, 2))),
])
def test_lambda_interval_cases(s, v, expected):
    got = lambda_interval(F(s), v if v in (INF, NEG_INF) else F(v))
    assert got == expected


def test_polar_of_abs_is_abs():
    g = Grid.regular(-2, 2, F(1, 2))
    f = Pointwise(lambda x: abs(x[0]), 1)
    fo = polar_nonneg_sup(f, g, g)
    assert [fo(y) for y in g.nodes] == [abs(y[0]) for y in g.nodes]
    assert list(polar_general_inf_grid(f, g, g).values) == list(fo.values)


def test_sup_form_rejects_negative_values():
    g = Grid.regular(-1, 1, 1)
    with pytest.raises(NegativeValueError):
        polar_nonneg_sup(Pointwise(lambda x: x[0], 1), g, g)


def test_inf_form_with_negative_values():
    # f = -1 at the origin too: 0 <= -lam fails, so the polar is +inf
    g = Grid.regular(-1, 1, F(1, 2))
    f = Sampled(g, [F(-1)] * g.size)
    assert all(v == INF for v in polar_general_inf_grid(f, g).values)
    # off the origin only: x in {1/2, 1}, f = -1, y = -2 gives lam <= 1
    h = Grid.regular(F(1, 2), 1, F(1, 2))
    f = Sampled(h, [F(-1), F(-1)])
    assert polar_general_inf(f, (F(-2),)) == 0
    assert polar_general_inf(f, (F(2),)) == INF


@settings(max_examples=40, deadline=None)
@given(st.lists(st.one_of(st.just(INF), st.just(NEG_INF), st.integers(-3, 3).map(F)),
                min_size=5, max_size=5),
       st.integers(-2, 2))
def test_inf_form_matches_loop(values, yi):
    g = Grid.regular(-1, 1, F(1, 2))
    f = Sampled(g, values)
    y = (F(yi, 2),)
    grid = polar_general_inf_grid(f, g)
    assert grid(y) == brute_polar(f, g, y) == polar_general_inf(f, y)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.one_of(st.just(INF), st.integers(0, 4).map(F)), min_size=9, max_size=9))
def test_sup_and_inf_forms_agree_for_nonnegative(values):
    g = Grid.regular(-2, 2, F(1, 2))
    f = Sampled(g, values)
    sup = polar_nonneg_sup(f, g)
    inf = polar_general_inf_grid(f, g)
    assert list(sup.values) == list(inf.values)
    assert polar_inequality_check(f, g, g, sup).passed


def test_exact_polar_routes():
    sq, cr = square(), cross_polytope()
    r = polar_exact(MinkowskiOf(sq))
    assert r.derivation == "minkowski-of-levelset"
    assert r.func((2, 1)) == 3  # gauge of the cross
    r = polar_exact(MinkowskiOf(sq), "support")
    assert r.func((2, 1)) == 3
    with pytest.raises(ValueError):
        polar_exact(MinkowskiOf(sq), "nope")
    b = bipolar_transform(GenIndicator(sq))
    assert b.derivation == "support-of-levelset"
    assert b.func.body == cr


def test_grid_bipolar_is_below_f():
    g = Grid.regular(-2, 2, F(1, 2))
    f = Pointwise(lambda x: x[0] ** 2, 1)
    b = bipolar_transform(f, g, g)
    assert b.derivation == "sup-form"
    s = sample(f, g)
    assert all(bv <= fv for bv, fv in zip(b.func.values, s.values))


@pytest.mark.parametrize("row", TABLE_ROWS)
@pytest.mark.parametrize("body", [square(), cross_polytope(),
                                  ConvexBody.from_points([(-1, -1), (2, -1), (-1, 2)])],
                         ids=["square", "cross", "triangle"])
def test_table_rows_exactly(row, body):
    rep = verify_table_row(row, body, include_sampled=False)
    assert rep.passed, [c for c in rep.failures]


@pytest.mark.parametrize("row", TABLE_ROWS)
def test_table_rows_sampled(row):
    rep = verify_table_row(row, square())
    assert rep.passed, [c for c in rep.failures]


def test_table_row_entries():
    sq, cr = square(), cross_polytope()
    tr = table_row("support", sq)
    assert tr.polar[0]((2, 1)) == 2  # gauge of the square
    assert tr.zero_set == sq
    tr = table_row("minkowski", sq)
    assert tr.zero_set == cr
    assert tr.bipolar((2, 1)) == 2  # gauge of the square is its own bipolar
    tr = table_row("indicator", sq)
    assert tr.zero_set == ConvexBody.origin(2)
    with pytest.raises(ValueError):
        table_row("bogus", sq)


def test_support_row_needs_bipolar_body():
    off = ConvexBody.from_points([(1, 1), (2, 1), (1, 2)])
    rep = verify_table_row("support", off, include_sampled=False)
    assert not rep.passed
    assert rep.failed_equations == ["support:precondition"]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_random_polytope_rows(seed):
    P = random_bipolar_polytope(random.Random(seed))
    for row in ("support", "minkowski"):
        assert verify_table_row(row, P, include_sampled=False).passed


def test_polar_swaps_support_and_gauge_exactly():
    rng = random.Random(5)
    for _ in range(10):
        P = random_bipolar_polytope(rng)
        g = polar_exact(SupportOf(P)).func
        Pp = polar_set(P)
        for x in Grid.regular(-2, 2, 1, dim=2).nodes:
            assert g(x) == MinkowskiOf(P)(x)
            assert SupportOf(Pp)(x) == g(x)


def test_float_grids_three_dimensions():
    g = Grid.regular(-1, 1, 0.5, dim=3, exact=False)
    f = MinkowskiOf(square(dim=3))
    sup = polar_nonneg_sup(f, g, g)
    inf = polar_general_inf_grid(f, g, g)
    assert sup.values.dtype == float
    assert np.allclose(sup.values, inf.values)
    assert polar_inequality_check(f, g, g).passed
