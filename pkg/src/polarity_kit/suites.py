"""Verification suites over seeded instance families, and the scenario runner.

Each suite returns a :class:`~polarity_kit.report.Report`; the runner maps
the ``checks`` of a scenario onto them.
"""

from __future__ import annotations

import logging
from fractions import Fraction

from . import extarith as ea
from .approx import best_convex_minorant, best_homogeneous_convex_minorant, linear_minorant_sup_oracle
from .bipolar_lattice import (
    BipolarFunction,
    is_bipolar_function,
    lattice_isomorphism_check,
    sandwich_check,
)
from .descriptors import DescriptorError, Scenario, orthant, parse_body, simplex
from .extarith import INF
from .funcrep import (
    GenIndicator,
    Grid,
    Indicator,
    MinkowskiOf,
    Pointwise,
    Sampled,
    SupportOf,
    sample,
)
from .geometry import bipolar_set, cross_polytope, hull_with_origin, polar_set, square
from .instances import random_bipolar_polytope, random_generator_set, rng_for
from .report import Report, max_excess, max_gap
from .subdiff import alignment_equivalence_report, upper_tightness_check
from .transforms import (
    TABLE_ROWS,
    UnsupportedFunction,
    polar_general_inf_grid,
    polar_inequality_check,
    polar_nonneg_sup,
    verify_table_row,
)

log = logging.getLogger(__name__)


def bipolar_theorem_suite(count: int = 200, seed: int = 0, max_points: int = 8) -> Report:
    """Double polar equals the closed convex hull with the origin, and the
    polar of the bipolar equals the polar, for random generator sets."""
    rep = Report()
    rng = rng_for(seed, "bipolar-theorem")
    bad_hull = bad_polar = 0
    for _ in range(count):
        B = random_generator_set(rng, max_points)
        Bo = polar_set(B)
        Boo = polar_set(Bo.canonical())
        if not Boo == hull_with_origin(B) or not bipolar_set(B, check=False) == Boo:
            bad_hull += 1
        if not polar_set(Boo.canonical()) == Bo:
            bad_polar += 1
    rep.add("bipolar-theorem:double-polar-is-hull", f"{count} sets, seed {seed}", bad_hull, 0, True)
    rep.add("bipolar-theorem:polar-of-bipolar", f"{count} sets, seed {seed}", bad_polar, 0, True)
    return rep


def nonnegative_corpus(dim: int = 2):
    """Named nonnegative functions used by the formula-agreement suite."""
    S, C = square(1, dim), cross_polytope(1, dim)
    T = simplex(dim)
    one = Fraction(1)
    corpus = {
        "l1-norm": SupportOf(S),
        "max-norm": SupportOf(C),
        "gauge-triangle": MinkowskiOf(T),
        "support-triangle": SupportOf(T),
        "indicator-square": Indicator(S),
        "indicator-quadrant": Indicator(orthant(dim)),
        "gen-indicator-square": GenIndicator(S),
        "gen-indicator-cross": GenIndicator(C),
        "zero-off-origin": Pointwise(lambda x: abs(x[0] - one) + sum(abs(c) for c in x[1:]),
                                     dim, "|x1-1|+|x2|"),
        "half-quadratic": Pointwise(lambda x: sum(c * c for c in x) / 2, dim, "|x|^2/2"),
        "plus-infinity": Pointwise(lambda x: INF, dim, "+inf"),
    }
    return corpus


def formula_agreement_suite(corpus=None, primal: Grid | None = None,
                            dual: Grid | None = None) -> Report:
    """Sup and inf forms of the grid polar agree at every dual node
    (tolerance 0), and the polar inequality holds at every node pair."""
    primal = primal or Grid.regular(-2, 2, Fraction(1, 2), 2)
    dual = dual or primal
    corpus = corpus or nonnegative_corpus(primal.dim)
    rep = Report()
    ex = primal.exact and dual.exact
    for name, f in corpus.items():
        s = sample(f, primal)
        sup = polar_nonneg_sup(s, dual)
        inf = polar_general_inf_grid(s, dual)
        rep.add("formula-agreement:sup-equals-inf", name,
                max_gap((sup.values, inf.values)), 0, ex)
        rep.extend(polar_inequality_check(s, primal, dual, sup, name))
    return rep


def lattice_suite(count: int = 100, seed: int = 0) -> Report:
    rep = Report()
    rng = rng_for(seed, "lattice")
    totals = {}
    for _ in range(count):
        P = random_bipolar_polytope(rng)
        Q = random_bipolar_polytope(rng)
        for c in lattice_isomorphism_check(P, Q).checks:
            totals[c.equation] = totals.get(c.equation, 0) + (not c.passed)
    for eq, bad in sorted(totals.items()):
        rep.add(eq, f"{count} pairs, seed {seed}", bad, 0, True)
    return rep


def sandwich_suite(count: int = 20, seed: int = 0, grid: Grid | None = None) -> Report:
    grid = grid or Grid.regular(-2, 2, Fraction(1, 2), 2)
    rep = Report()
    rng = rng_for(seed, "sandwich")
    worst = {}
    for k in range(count):
        f = BipolarFunction.from_gauge(random_bipolar_polytope(rng))
        g = BipolarFunction.from_support(random_bipolar_polytope(rng))
        for c in sandwich_check(f, g, grid, f"pair {k}").checks:
            worst[c.equation] = max(worst.get(c.equation, 0), c.discrepancy)
    for eq, w in sorted(worst.items()):
        rep.add(eq, f"{count} pairs, seed {seed}", w, 0, grid.exact)
    return rep


def alignment_suite(P=None, D=None, grid: Grid | None = None, instance="square/cross") -> Report:
    P = P if P is not None else square(1, 2)
    D = D if D is not None else polar_set(P).canonical()
    grid = grid or Grid.regular(-3, 3, Fraction(1, 2), 2)
    return alignment_equivalence_report(P, D, primal=grid, dual=grid, instance=instance)


def extarith_suite() -> Report:
    rep = Report()
    for E in (ea.MULTIPLICATIVE, ea.ADDITIVE):
        for r in ea.check_laws(E):
            rep.add(f"extarith:{r.law}", E.name, len(r.failures), 0, True,
                    f"{r.cases} cases")
    return rep


def convex_minorant_checks(f, grid: Grid, dual: Grid | None = None, expected=None,
                           instance="") -> Report:
    rep = Report()
    ex = grid.exact
    g = best_convex_minorant(f, grid, dual)
    gs = sample(g, grid)
    fs = sample(f, grid)
    rep.add("approx:convex:minorant", instance, max_excess((gs.values, fs.values)), 0, ex)
    rep.add("approx:convex:midpoint-convex", instance, _midpoint_violation(gs), 0, ex)
    if expected is not None:
        es = sample(expected, grid)
        rep.add("approx:convex:expected", instance, max_gap((gs.values, es.values)), 0, ex)
    return rep


def homogeneous_minorant_checks(f, grid: Grid, dual: Grid | None = None, expected=None,
                                instance="") -> Report:
    rep = Report()
    ex = grid.exact
    h = best_homogeneous_convex_minorant(f, grid, dual)
    hs = sample(h, grid)
    fs = sample(f, grid)
    rep.add("approx:homogeneous:minorant", instance, max_excess((hs.values, fs.values)), 0, ex)
    rep.add("approx:homogeneous:midpoint-convex", instance, _midpoint_violation(hs), 0, ex)
    o = grid.origin_index
    rep.add_bool("approx:homogeneous:zero-at-origin", instance,
                 hs.values[o] in (0, ea.NEG_INF), f"value {hs.values[o]} at the origin")
    if all(v >= 0 for v in fs.values):
        # Admissibility is tested at nodes only, so the oracle is an inner
        # approximation of the grid bipolar, not of the true minorant.
        oracle = linear_minorant_sup_oracle(fs, grid)
        foo = polar_nonneg_sup(polar_nonneg_sup(fs, grid), grid)
        note = "oracle capped by its ladder" if oracle.truncated else ""
        rep.add("approx:oracle:below-grid-bipolar", instance,
                max_excess((oracle.values.values, foo.values)), 0, ex, note)
        exact_h = _exact_homogeneous(f)
        if exact_h is not None:
            es = sample(exact_h, grid)
            rep.add("approx:homogeneous:above-oracle", instance,
                    max_excess((oracle.values.values, es.values)), 0, ex, note)
    if expected is not None:
        es = sample(expected, grid)
        rep.add("approx:homogeneous:expected", instance, max_gap((hs.values, es.values)), 0, ex)
    return rep


def _exact_homogeneous(f):
    if isinstance(f, (Pointwise, Sampled)):
        return None
    try:
        return best_homogeneous_convex_minorant(f)
    except UnsupportedFunction:
        return None


def _midpoint_violation(s: Sampled):
    """Worst ``f((x+z)/2) - (f(x) + f(z))/2`` over node pairs whose midpoint is a node."""
    grid = s.grid
    nodes = grid.nodes
    vals = s.values
    if grid.size > 400:
        rng = rng_for(0, "midpoint")
        pairs = [(rng.randrange(grid.size), rng.randrange(grid.size)) for _ in range(4000)]
    else:
        pairs = [(i, j) for i in range(grid.size) for j in range(i + 1, grid.size)]
    worst = 0
    for i, j in pairs:
        k = grid.index(tuple((a + b) / 2 for a, b in zip(nodes[i], nodes[j])))
        if k is None:
            continue
        rhs = ea.upper_add(vals[i], vals[j])
        if rhs not in (INF, ea.NEG_INF):
            rhs = rhs / 2
        if vals[k] > rhs:
            gap = INF if vals[k] == INF or rhs == ea.NEG_INF else vals[k] - rhs
            worst = max(worst, gap)
    return worst


# ---------------------------------------------------------------------------
# Scenario runner
# ---------------------------------------------------------------------------


CHECK_KINDS = ("table-row", "bipolar-theorem", "formula-agreement", "lattice", "sandwich",
               "alignment", "subdiff-tightness", "convex-minorant", "homogeneous-minorant",
               "extarith-laws", "bipolar-function")


def run_scenario(sc: Scenario, seed: int | None = None, tolerance=None, exact: bool = True) -> Report:
    """Run every check of a scenario.

    ``seed`` overrides the scenario seed; ``tolerance`` overrides the default
    tolerance of sampled checks that do not set their own.
    """
    seed = sc.seed if seed is None else seed
    rep = Report()
    for i, c in enumerate(sc.checks):
        path = f"checks[{i}]"
        kind = c["kind"]
        log.info("running %s (%s)", path, kind)
        tol = c.get("tolerance", tolerance)
        tol = None if tol is None else float(Fraction(str(tol)))
        inst = c.get("instance", f"{sc.id}/{i}")
        rep.extend(_run_check(sc, kind, c, path, seed, tol, inst, exact))
    return rep


def _body(sc, c, key, path, exact, default=None):
    ref = c.get(key, default)
    if ref is None:
        raise DescriptorError(f"{path}.{key}", "missing field")
    if isinstance(ref, str) and ref in sc.bodies:
        return sc.bodies[ref]
    return parse_body(ref, f"{path}.{key}", exact, sc.bodies)


def _grid(sc, c, key, path, default=None):
    ref = c.get(key)
    if ref is None:
        return default
    if ref not in sc.grids:
        raise DescriptorError(f"{path}.{key}", f"unresolved name {ref!r}")
    return sc.grids[ref]


def _func(sc, c, key, path):
    ref = c.get(key)
    if ref is None:
        raise DescriptorError(f"{path}.{key}", "missing field")
    if ref not in sc.functions:
        raise DescriptorError(f"{path}.{key}", f"unresolved name {ref!r}")
    return sc.functions[ref]


def _run_check(sc, kind, c, path, seed, tol, inst, exact) -> Report:
    if kind == "table-row":
        body = _body(sc, c, "body", path, exact)
        rows = c.get("rows", [c["row"]] if "row" in c else list(TABLE_ROWS))
        if rows == "all":
            rows = list(TABLE_ROWS)
        rep = Report()
        name = c.get("body") if isinstance(c.get("body"), str) else inst
        for row in rows:
            if row not in TABLE_ROWS:
                raise DescriptorError(f"{path}.rows", f"unknown table row {row!r}")
            rep.extend(verify_table_row(row, body, _grid(sc, c, "probe", path),
                                        _grid(sc, c, "sampled", path), c.get("L"), tol,
                                        f"{name}", c.get("include_sampled", True)))
        return rep
    if kind == "bipolar-theorem":
        return bipolar_theorem_suite(int(c.get("count", 200)), seed, int(c.get("max_points", 8)))
    if kind == "formula-agreement":
        names = c.get("functions")
        primal = _grid(sc, c, "primal", path)
        if names is None:
            corpus = None
        else:
            corpus = {n: _func(sc, {"f": n}, "f", f"{path}.functions") for n in names}
        return formula_agreement_suite(corpus, primal, _grid(sc, c, "dual", path, primal))
    if kind == "lattice":
        if "P" in c:
            return lattice_isomorphism_check(_body(sc, c, "P", path, exact),
                                             _body(sc, c, "Q", path, exact),
                                             _grid(sc, c, "probe", path), inst)
        return lattice_suite(int(c.get("count", 100)), seed)
    if kind == "sandwich":
        grid = _grid(sc, c, "grid", path)
        if "P" in c:
            f = BipolarFunction.from_gauge(_body(sc, c, "P", path, exact))
            g = BipolarFunction.from_gauge(_body(sc, c, "Q", path, exact))
            return sandwich_check(f, g, grid or Grid.regular(-2, 2, Fraction(1, 2), 2), inst)
        return sandwich_suite(int(c.get("count", 20)), seed, grid)
    if kind == "alignment":
        P = _body(sc, c, "P", path, exact, "square")
        D = _body(sc, c, "D", path, exact) if "D" in c else None
        return alignment_suite(P, D, _grid(sc, c, "grid", path), inst)
    if kind == "subdiff-tightness":
        f = _func(sc, c, "function", path)
        primal = _grid(sc, c, "primal", path)
        if primal is None:
            raise DescriptorError(f"{path}.primal", "missing field")
        return upper_tightness_check(f, primal, _grid(sc, c, "dual", path, primal),
                                     tol or 0, inst)
    if kind in ("convex-minorant", "homogeneous-minorant"):
        f = _func(sc, c, "function", path)
        grid = _grid(sc, c, "grid", path)
        if grid is None:
            raise DescriptorError(f"{path}.grid", "missing field")
        expected = _func(sc, c, "expected", path) if "expected" in c else None
        fn = convex_minorant_checks if kind == "convex-minorant" else homogeneous_minorant_checks
        return fn(f, grid, _grid(sc, c, "dual", path), expected, inst)
    if kind == "extarith-laws":
        return extarith_suite()
    if kind == "bipolar-function":
        f = _func(sc, c, "function", path)
        grid = _grid(sc, c, "grid", path)
        if grid is None:
            raise DescriptorError(f"{path}.grid", "missing field")
        return is_bipolar_function(f, grid, tol or 0, seed, instance=inst)
    raise DescriptorError(f"{path}.kind",
                          f"unknown check kind {kind!r}; expected one of {', '.join(CHECK_KINDS)}")


__all__ = [
    "bipolar_theorem_suite",
    "formula_agreement_suite",
    "nonnegative_corpus",
    "lattice_suite",
    "sandwich_suite",
    "alignment_suite",
    "extarith_suite",
    "convex_minorant_checks",
    "homogeneous_minorant_checks",
    "run_scenario",
    "CHECK_KINDS",
]
