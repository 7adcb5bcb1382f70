from fractions import Fraction as F
import random

import pytest
from hypothesis import given, settings, strategies as st

from polarity_kit.extarith import INF
from polarity_kit.funcrep import Grid, MinkowskiOf, Pointwise, Sampled, SupportOf, sample
from polarity_kit.geometry import ConvexBody, NotBipolarError, cross_polytope, polar_set, square
from polarity_kit.instances import random_bipolar_polytope
from polarity_kit.subdiff import (
    _generic_counts,
    _grid_kernel,
    alignment_clauses,
    alignment_equivalence_report,
    grid_pairs,
    is_aligned,
    lower_polar_subdiff,
    lower_subdiff_argmax,
    middle_polar_subdiff,
    subdiff_differences,
    upper_polar_subdiff,
    upper_tightness_check,
)
from polarity_kit.transforms import polar_nonneg_sup

SQ, CR = square(), cross_polytope()
LINE = Grid.regular(-3, 3, F(1, 2))
ABS = Pointwise(lambda x: abs(x[0]), 1)


def nodes_where(pred, grid=LINE):
    return frozenset(y for y in grid.nodes if pred(y[0]))


def test_abs_at_zero():
    assert lower_polar_subdiff(ABS, (0,), LINE, LINE).members == {(0,)}
    assert upper_polar_subdiff(ABS, (0,), LINE, LINE).members == frozenset(LINE.nodes)
    assert middle_polar_subdiff(ABS, (0,), LINE, LINE).members == frozenset(LINE.nodes)


def test_abs_at_one():
    assert lower_polar_subdiff(ABS, (1,), LINE, LINE).members == nodes_where(lambda y: y >= 0)
    assert upper_polar_subdiff(ABS, (1,), LINE, LINE).members == nodes_where(lambda y: y > 0)
    assert middle_polar_subdiff(ABS, (1,), LINE, LINE).members == nodes_where(lambda y: y >= 0)


def test_constant_infinity_has_every_node_in_lower():
    top = Sampled(LINE, [INF] * LINE.size)
    assert lower_polar_subdiff(top, (1,), LINE).members == frozenset(LINE.nodes)


def test_result_container():
    r = lower_polar_subdiff(ABS, (1,), LINE, LINE)
    assert r.kind == "lower" and r.base_point == (1,)
    assert (2,) in r and (-2,) not in r
    assert len(r) == 7
    with pytest.raises(ValueError):
        lower_polar_subdiff(ABS, (F(1, 3),), LINE, LINE)


def test_alternate_middle_form_can_differ():
    # f = max(-x, 0) is the support function of [-1, 0]; f(1) = 0, f°(-1) = 1
    seg = ConvexBody.from_points([(-1,), (0,)])
    g = Grid.regular(-2, 2, 1)
    f = SupportOf(seg)
    assert (-1,) in middle_polar_subdiff(f, (1,), g, g)
    assert (-1,) not in middle_polar_subdiff(f, (1,), g, g, alternate=True)


def test_lower_matches_argmax_form():
    for x in LINE.nodes:
        assert (lower_polar_subdiff(ABS, x, LINE, LINE).members
                == lower_subdiff_argmax(ABS, x, LINE, LINE))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.one_of(st.just(INF), st.integers(0, 3).map(F)), min_size=9, max_size=9),
       st.integers(0, 8))
def test_argmax_form_on_random_tables(values, i):
    g = Grid.regular(-2, 2, F(1, 2))
    f = Sampled(g, values)
    x = g.nodes[i]
    assert lower_polar_subdiff(f, x, g).members == lower_subdiff_argmax(f, x, g)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.one_of(st.just(INF), st.integers(0, 3).map(F)), min_size=9, max_size=9))
def test_nonempty_upper_implies_tight(values):
    g = Grid.regular(-2, 2, F(1, 2))
    assert upper_tightness_check(Sampled(g, values), g, g).passed


def test_upper_tightness_reports_node_count():
    rep = upper_tightness_check(ABS, LINE, LINE)
    assert rep.passed
    assert rep.checks[0].detail.startswith(f"{LINE.size} of {LINE.size}")


def test_differences_are_reported_not_asserted():
    d = subdiff_differences(ABS, (0,), LINE, LINE)
    assert d["upper-minus-lower"] == LINE.size - 1
    assert d["lower-minus-upper"] == 0
    assert set(d) == {f"{a}-minus-{b}" for a in ("lower", "upper", "middle")
                      for b in ("lower", "upper", "middle") if a != b}


@pytest.mark.parametrize("x, y, expected", [
    ((1, 0), (1, 0), True),
    ((1, 1), (1, 0), True),
    ((0, 1), (1, 0), False),
    ((1, 0), (-1, 0), False),
    ((2, 1), (1, 1), False),
])
def test_alignment_square_cross(x, y, expected):
    # P = cross, D = square: sigma_D = l1 norm, sigma_P = max norm
    assert is_aligned(SQ, CR, x, y) is expected


def test_is_aligned_needs_polar_pair():
    with pytest.raises(NotBipolarError):
        is_aligned(SQ, SQ, (1, 0), (1, 0))


def test_clauses_all_true_on_aligned_pair():
    cl = alignment_clauses(SQ, CR, (1, 0), (1, 0))
    assert all(cl.values())
    cl = alignment_clauses(SQ, CR, (0, 1), (1, 0))
    assert not any(cl.values())


def test_clauses_excluded_on_unbounded_direction():
    P = ConvexBody.from_halfspaces([((-1, 0), 0)])  # x1 >= 0
    D = polar_set(P)
    assert alignment_clauses(P, D, (-1, 0), (1, 0)) is None


def test_middle_membership_of_support_pair():
    g = Grid.regular(-1, 1, F(1, 2), dim=2)
    r = middle_polar_subdiff(SupportOf(CR), (1, 0), g, g)
    assert (1, 0) in r
    # orthogonal, nonzero pair: positive product, zero pairing
    assert (0, 1) not in r


def test_kernel_matches_generic_path():
    g = Grid.regular(-F(3, 2), F(3, 2), F(1, 2), dim=2)
    fast = _grid_kernel(SQ, CR, g, g)
    slow = _generic_counts(SQ, CR, grid_pairs(g, g), g, g)
    assert fast == slow
    n, excluded, bad, sym, dich, degen = fast
    assert n == 49 ** 2 and bad == 0 and sym == 0 and degen == 0
    assert dich > 0


@settings(max_examples=4, deadline=None)
@given(st.integers(0, 10**6))
def test_kernel_matches_generic_on_random_pairs(seed):
    P = random_bipolar_polytope(random.Random(seed))
    D = polar_set(P).canonical()
    g = Grid.regular(-2, 2, 1, dim=2)
    assert _grid_kernel(P, D, g, g) == _generic_counts(P, D, grid_pairs(g, g), g, g)


def test_report_on_samples_and_exclusions():
    P = ConvexBody.from_halfspaces([((-1, 0), 0)])
    D = polar_set(P)
    rep = alignment_equivalence_report(P, D, samples=[((-1, 0), (1, 0)), ((1, 1), (0, 1))])
    c = {ch.equation: ch for ch in rep.checks}
    assert c["alignment:clause-agreement"].passed
    assert "precondition-excluded" in c["alignment:clause-agreement"].detail


def test_degenerate_branch_holds_where_dichotomy_breaks():
    g = Grid.regular(-1, 1, F(1, 2), dim=2)
    rep = alignment_equivalence_report(SQ, CR, primal=g, dual=g)
    failed = rep.failed_equations
    assert failed == ["alignment:middle-dichotomy"]


def test_float_polar_subdiff_with_tolerance():
    g = Grid.regular(-1, 1, 0.5, dim=3, exact=False)
    f = MinkowskiOf(square(dim=3))
    s = sample(f, g)
    fo = polar_nonneg_sup(s, g)
    r = middle_polar_subdiff(s, (1.0, 0.0, 0.0), g, fo=fo, tol=1e-9)
    assert (1.0, 0.0, 0.0) in r
