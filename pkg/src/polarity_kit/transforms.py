"""Fenchel conjugation and the polar / bipolar transforms.

Two families of routes are provided and cross-checked against each other:

* grid routes, working on :class:`~polarity_kit.funcrep.Sampled` values
  (sup over primal nodes, inner approximations of the true transforms);
* exact routes for the polyhedral closed forms, going through the zero
  level set of the conjugate and the geometry module.

For ``f >= 0`` the polar is ``f°(y) = sup_x <x,y>_+ (lower*) f(x)^-1``.
For arbitrary extended-real ``f`` it is
``f°(y) = inf{lam > 0 : <x,y> <= lam f(x) for all x}`` (inf of nothing is
``+inf``). The spaces are paired by the dot product on R^d, so the reverse
polar uses the same formula with the roles of the grids exchanged.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import extarith as ea
from .extarith import INF, NEG_INF
from .funcrep import (
    FuncRep,
    GenIndicator,
    Grid,
    Indicator,
    MinkowskiOf,
    Sampled,
    SupportOf,
    Valley,
    level_set,
    sample,
    support_as_max_affine,
)
from .geometry import (
    ConvexBody,
    bipolar_set,
    is_bipolar_set,
    polar_cone,
    polar_set,
)
from ._linalg import FLOAT_TOL
from .report import Report, max_excess, max_gap


class TransformResult(NamedTuple):
    """A transformed function together with the formula that produced it.

    Derivation tags: ``sup-form``, ``inf-form``, ``minkowski-of-levelset``,
    ``support-of-polarset``, ``support-of-levelset``,
    ``minkowski-of-polarset``, ``table-row``.
    """

    func: FuncRep
    derivation: str


class UnsupportedFunction(TypeError):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _sampled(f, grid: Grid | None) -> Sampled:
    if isinstance(f, Sampled) and (grid is None or f.grid == grid):
        return f
    if grid is None:
        raise ValueError(f"{f!r} is not sampled; a primal grid is required")
    return sample(f, grid)


def _pairing(primal: Grid, dual: Grid) -> np.ndarray:
    """Matrix of ``<x, y>`` with primal nodes as rows and dual nodes as columns."""
    if primal.dim != dual.dim:
        raise ValueError(f"grid dimensions differ: {primal.dim} vs {dual.dim}")
    exact = primal.exact and dual.exact
    X = primal.node_array() if exact else primal.node_array().astype(float)
    Y = dual.node_array() if exact else dual.node_array().astype(float)
    return X @ Y.T


def _exact_pair(primal: Grid, dual: Grid) -> bool:
    return primal.exact and dual.exact


def _values(s: Sampled, exact: bool) -> np.ndarray:
    if exact:
        return s.values
    return s.values.astype(float)


def is_nonnegative(f: FuncRep) -> bool | None:
    """Known sign for closed forms; ``None`` when it has to be sampled."""
    if isinstance(f, (Indicator, GenIndicator, MinkowskiOf)):
        return True
    if isinstance(f, SupportOf):
        return f.body.contains((0,) * f.dim)
    if isinstance(f, Valley):
        return f.body.is_empty
    if isinstance(f, Sampled):
        return bool(np.all(f.values >= 0))
    return None


# ---------------------------------------------------------------------------
# Fenchel conjugate
# ---------------------------------------------------------------------------


def fenchel_conjugate_grid(f, dual: Grid, primal: Grid | None = None) -> Sampled:
    """``f*(y) = max_x <x,y> - f(x)`` over the primal nodes.

    The subtraction uses upper addition, so a single node with
    ``f(x) = -inf`` makes ``f*`` identically ``+inf``; nodes where
    ``f = +inf`` contribute nothing, and ``f* = -inf`` when all of them do.
    """
    s = _sampled(f, primal)
    primal = s.grid
    exact = _exact_pair(primal, dual)
    v = _values(s, exact)
    target = dual if exact else _float_grid(dual)
    if np.any(v == NEG_INF):
        return Sampled(target, [INF] * dual.size)
    finite = v != INF
    if not finite.any():
        return Sampled(target, [NEG_INF] * dual.size)
    S = _pairing(primal, dual)[finite]
    vals = (S - v[finite][:, None]).max(axis=0)
    return Sampled(target, vals)


def _float_grid(g: Grid) -> Grid:
    return g if not g.exact else g.with_exact(False)


def fenchel_conjugate_exact(f: FuncRep) -> FuncRep:
    """Closed-form conjugate of the polyhedral closed forms.

    ``sigma_D -> delta_D``, ``delta_G -> sigma_G``, ``chi_G -> sigma_G - 1``
    and ``gamma_G -> delta_{G°}``.
    """
    if isinstance(f, SupportOf):
        return Indicator(f.body)
    if isinstance(f, GenIndicator):
        return support_as_max_affine(f.body, shift=-1)
    if isinstance(f, Indicator):
        return SupportOf(f.body)
    if isinstance(f, MinkowskiOf):
        return Indicator(polar_set(f.body))
    raise UnsupportedFunction(
        f"no closed-form conjugate for {type(f).__name__}; use fenchel_conjugate_grid")


def conjugate_zero_level_set(f: FuncRep, dual: Grid | None = None,
                             primal: Grid | None = None):
    """``{y : f*(y) <= 0}``: an exact body for closed forms, a node set on grids."""
    if dual is not None:
        return level_set(fenchel_conjugate_grid(f, dual, primal), 0)
    return level_set(fenchel_conjugate_exact(f), 0)


def fenchel_subdifferential_grid(f, x, dual: Grid, primal: Grid | None = None) -> frozenset:
    """Dual nodes ``y`` with ``f(x') >= f(x) + <x' - x, y>`` at every primal node."""
    s = _sampled(f, primal)
    primal = s.grid
    exact = _exact_pair(primal, dual)
    i = primal.index(x)
    if i is None:
        raise ValueError(f"{x} is not a primal node")
    v = _values(s, exact)
    fx = v[i]
    S = _pairing(primal, dual)
    out = []
    for j, y in enumerate(dual.nodes):
        col = S[:, j]
        sx = col[i]
        ok = True
        for k in range(primal.size):
            rhs = ea.upper_add(fx, col[k] - sx)
            if not v[k] >= rhs:
                ok = False
                break
        if ok:
            out.append(y)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Polar transform, sup form (nonnegative functions)
# ---------------------------------------------------------------------------


class NegativeValueError(ValueError):
    pass


def polar_nonneg_sup(f, dual: Grid, primal: Grid | None = None) -> Sampled:
    """``f°(y) = max_x <x,y>_+ (lower*) f(x)^-1`` over the primal nodes.

    Requires ``f >= 0`` at every node; use :func:`polar_general_inf_grid`
    otherwise.
    """
    s = _sampled(f, primal)
    primal = s.grid
    exact = _exact_pair(primal, dual)
    v = _values(s, exact)
    if np.any(v < 0):
        raise NegativeValueError(
            "negative value found; the sup form needs f >= 0, use polar_general_inf")
    S = _pairing(primal, dual)
    Sp = np.where(S > 0, S, 0)
    vals = ea.lower_div_array(Sp, v[:, None]).max(axis=0)
    return Sampled(dual if exact else _float_grid(dual), vals)


# ---------------------------------------------------------------------------
# Polar transform, inf form (any extended-real function)
# ---------------------------------------------------------------------------


def lambda_interval(s, v):
    """Admissible ``lam > 0`` for the single constraint ``s <= lam * v``.

    Returns ``(lo, hi)`` meaning ``lo <= lam <= hi`` (``lo = 0`` for no lower
    bound, ``hi = inf`` for no upper bound), or ``None`` when no positive
    ``lam`` works. Cases by the class of ``v`` and the sign of ``s``::

        v = +inf          any s      no constraint
        v = -inf          any s      infeasible
        0 < v < inf       s > 0      lam >= s / v
        0 < v < inf       s <= 0     no constraint
        v = 0             s > 0      infeasible
        v = 0             s <= 0     no constraint
        -inf < v < 0      s >= 0     infeasible
        -inf < v < 0      s < 0      lam <= s / v
    """
    if v == INF:
        return (0, INF)
    if v == NEG_INF:
        return None
    if v > 0:
        return (s / v, INF) if s > 0 else (0, INF)
    if v == 0:
        return None if s > 0 else (0, INF)
    if s >= 0:
        return None
    return (0, s / v)


def _inf_from_bounds(lo, hi):
    if lo > hi:
        return INF
    return lo


def polar_general_inf(f, y, primal: Grid | None = None):
    """``inf{lam > 0 : <x,y> <= lam f(x)}`` over the primal nodes (scalar)."""
    s = _sampled(f, primal)
    lo, hi = 0, INF
    for x, v in s.items():
        sv = sum(a * b for a, b in zip(x, y))
        iv = lambda_interval(sv, v)
        if iv is None:
            return INF
        lo = max(lo, iv[0])
        hi = min(hi, iv[1])
    return _inf_from_bounds(lo, hi)


def polar_general_inf_grid(f, dual: Grid, primal: Grid | None = None) -> Sampled:
    """Vectorised :func:`polar_general_inf` at every dual node."""
    s = _sampled(f, primal)
    primal = s.grid
    exact = _exact_pair(primal, dual)
    v = _values(s, exact)
    S = _pairing(primal, dual)
    N, M = S.shape
    V = np.broadcast_to(v[:, None], (N, M))
    finite = (V != INF) & (V != NEG_INF)
    pos = finite & (V > 0)
    neg = finite & (V < 0)
    zero = V == 0
    infeasible = (V == NEG_INF) | (zero & (S > 0)) | (neg & (S >= 0))
    lo_mask = pos & (S > 0)
    hi_mask = neg & (S < 0)
    dtype = object if exact else float
    lo = np.zeros((N, M), dtype=dtype)
    hi = np.full((N, M), INF, dtype=dtype)
    lo[lo_mask] = S[lo_mask] / V[lo_mask]
    hi[hi_mask] = S[hi_mask] / V[hi_mask]
    L = lo.max(axis=0)
    U = hi.min(axis=0)
    bad = infeasible.any(axis=0) | (L > U)
    out = np.where(bad, INF, L)
    if exact:
        out = np.array(list(out), dtype=object)
    return Sampled(dual if exact else _float_grid(dual), out)


def reverse_polar_grid(g, primal: Grid, dual: Grid | None = None) -> Sampled:
    """Reverse polar of a dual-space function back on the primal grid."""
    if is_nonnegative(_sampled(g, dual)):
        return polar_nonneg_sup(g, primal, dual)
    return polar_general_inf_grid(g, primal, dual)


# ---------------------------------------------------------------------------
# Exact routes
# ---------------------------------------------------------------------------


def polar_exact(f: FuncRep, form: str = "minkowski") -> TransformResult:
    """Exact polar through ``Z = [f* <= 0]``.

    ``form="minkowski"`` gives ``gamma_Z``; ``form="support"`` gives
    ``sigma_{Z°}``, valid for nonnegative ``f``.
    """
    Z = conjugate_zero_level_set(f)
    if form == "minkowski":
        return TransformResult(MinkowskiOf(Z), "minkowski-of-levelset")
    if form == "support":
        if is_nonnegative(f) is False:
            raise ValueError("the support form needs a nonnegative function")
        return TransformResult(SupportOf(polar_set(Z)), "support-of-polarset")
    raise ValueError(f"unknown form {form!r}")


def bipolar_transform(f: FuncRep, primal: Grid | None = None,
                      dual: Grid | None = None) -> TransformResult:
    """``f°°``: exact for closed forms, by two grid passes when grids are given.

    Exact route: ``sigma_Z`` with ``Z = [f* <= 0]`` when ``f >= 0``, and
    ``gamma_{Z°}`` in general.
    """
    if dual is not None:
        s = _sampled(f, primal)
        if is_nonnegative(s):
            fo = polar_nonneg_sup(s, dual)
            return TransformResult(polar_nonneg_sup(fo, s.grid), "sup-form")
        fo = polar_general_inf_grid(s, dual)
        return TransformResult(polar_general_inf_grid(fo, s.grid), "inf-form")
    Z = conjugate_zero_level_set(f)
    if is_nonnegative(f):
        return TransformResult(SupportOf(Z), "support-of-levelset")
    return TransformResult(MinkowskiOf(polar_set(Z)), "minkowski-of-polarset")


def polar_inequality_check(f, primal: Grid, dual: Grid, fo: Sampled | None = None,
                           instance: str = "") -> Report:
    """Check ``<x,y> <= f(x) (upper*) f°(y)`` at every primal/dual node pair."""
    s = _sampled(f, primal)
    primal = s.grid
    if fo is None:
        fo = polar_nonneg_sup(s, dual)
    exact = _exact_pair(primal, dual)
    S = _pairing(primal, dual)
    prod = ea.upper_mul_array(_values(s, exact)[:, None], _values(fo, exact)[None, :])
    if not exact:
        prod = prod.astype(float)
    worst = max_excess((S, prod))
    rep = Report()
    rep.add("polar-inequality", instance or repr(f), worst, 0, exact)
    return rep


# ---------------------------------------------------------------------------
# Tables of closed forms
# ---------------------------------------------------------------------------


class TableRow(NamedTuple):
    """Closed forms for one family of functions.

    ``conjugate``, ``zero_set``, ``polar`` (a pair of equal closed forms) and
    ``bipolar`` are built from geometry alone; ``requires_bipolar`` marks rows
    whose left-hand side is only defined for bipolar bodies.
    """

    func: FuncRep
    conjugate: FuncRep
    zero_set: ConvexBody
    polar: tuple
    bipolar: FuncRep
    requires_bipolar: bool


def table_row(row: str, body: ConvexBody) -> TableRow:
    if row == "support":
        Dp = polar_set(body)
        return TableRow(SupportOf(body), Indicator(body), body,
                        (MinkowskiOf(body), SupportOf(Dp)),
                        SupportOf(bipolar_set(body, check=False)), True)
    if row == "indicator":
        cone = polar_cone(body)
        cone2 = polar_cone(_with_generators(cone))
        return TableRow(Indicator(body), SupportOf(body), cone,
                        (Indicator(cone), SupportOf(cone2)),
                        Indicator(cone2), False)
    if row == "gen-indicator":
        Pp = polar_set(body)
        return TableRow(GenIndicator(body), support_as_max_affine(body, -1), Pp,
                        (MinkowskiOf(Pp), SupportOf(bipolar_set(body, check=False))),
                        SupportOf(Pp), False)
    if row == "minkowski":
        Pp = polar_set(body)
        return TableRow(MinkowskiOf(body), Indicator(Pp), Pp,
                        (MinkowskiOf(Pp), SupportOf(bipolar_set(body, check=False))),
                        SupportOf(Pp), False)
    if row == "minkowski-of-polar":
        Dp = polar_set(body)
        Dpp = polar_set(_with_generators(Dp))
        return TableRow(MinkowskiOf(Dp), Indicator(Dpp), Dpp,
                        (MinkowskiOf(Dpp), SupportOf(Dp)),
                        SupportOf(Dpp), False)
    raise ValueError(f"unknown table row {row!r}; expected one of {', '.join(TABLE_ROWS)}")


TABLE_ROWS = ("support", "indicator", "gen-indicator", "minkowski", "minkowski-of-polar")


def _with_generators(body: ConvexBody) -> ConvexBody:
    return ConvexBody(body.dim, points=body.points, rays=body.rays, exact=body.exact)


def _eval_all(f, nodes):
    return [f(x) for x in nodes]


def lipschitz_bound(body: ConvexBody) -> Fraction | int:
    """Lipschitz constant of ``sigma_body`` on its domain w.r.t. max-norm moves."""
    L = max((sum(abs(c) for c in p) for p in body.points), default=0)
    return L if L > 0 else 1


def default_probe_grid(dim: int, exact: bool = True) -> Grid:
    if dim == 1:
        return Grid.regular(-3, 3, Fraction(1, 4), 1, exact=exact)
    if dim == 2:
        return Grid.regular(-3, 3, Fraction(1, 2), 2, exact=exact)
    return Grid.regular(-2, 2, 1, dim, exact=False)


def default_sample_grid(dim: int) -> Grid:
    step = 0.25 if dim <= 2 else 0.5
    return Grid.regular(-3, 3, step, dim, exact=False)


def verify_table_row(row: str, body: ConvexBody, probe: Grid | None = None,
                     sampled: Grid | None = None, L=None, tolerance=None,
                     instance: str | None = None, include_sampled: bool = True) -> Report:
    """Instantiate one table row and check every route against its closed forms.

    Exact checks run at the ``probe`` nodes with tolerance 0 (exact
    arithmetic). Sampled checks use the float grid ``sampled`` (primal and
    dual alike) with tolerance ``2 L h`` unless ``tolerance`` overrides it.
    """
    inst = instance or f"{row}/{body!r}"
    rep = Report()
    cert = is_bipolar_set(body)
    tr = table_row(row, body)
    if tr.requires_bipolar and not cert.valid:
        flag = "contains_zero" if not cert.contains_zero else "closed_convex"
        rep.add_bool(f"{row}:precondition", inst, False,
                     f"body is not bipolar ({flag} is false)")
        return rep
    probe = probe or default_probe_grid(body.dim, body.exact)
    nodes = probe.nodes
    ex = probe.exact and body.exact
    tol0 = 0 if ex else 1e-9

    f = tr.func
    fvals = _eval_all(f, nodes)

    conj = fenchel_conjugate_exact(f)
    rep.add(f"{row}:conjugate", inst,
            max_gap(zip(_eval_all(conj, nodes), _eval_all(tr.conjugate, nodes))), tol0, ex)

    Z = conjugate_zero_level_set(f)
    rep.add_bool(f"{row}:conjugate-zero-level-set", inst, Z == tr.zero_set,
                 "zero level set of the conjugate differs from the table")

    table_polar = _eval_all(tr.polar[0], nodes)
    rep.add(f"{row}:polar:table-row", inst,
            max_gap(zip(table_polar, _eval_all(tr.polar[1], nodes))), tol0, ex)
    for form in ("minkowski", "support"):
        res = polar_exact(f, form)
        rep.add(f"{row}:polar:{res.derivation}", inst,
                max_gap(zip(_eval_all(res.func, nodes), table_polar)), tol0, ex)

    table_bip = _eval_all(tr.bipolar, nodes)
    res = bipolar_transform(f)
    rep.add(f"{row}:bipolar:{res.derivation}", inst,
            max_gap(zip(_eval_all(res.func, nodes), table_bip)), tol0, ex)
    rev = bipolar_transform(tr.polar[0])
    rev_polar = polar_exact(tr.polar[0], "support").func
    rep.add(f"{row}:bipolar:reverse-of-polar", inst,
            max_gap(zip(_eval_all(rev_polar, nodes), table_bip)), tol0, ex)
    rep.add(f"{row}:polar:gauge-fixed-point", inst,
            max_gap(zip(_eval_all(rev.func, nodes), table_polar)), tol0, ex)
    rep.add(f"{row}:bipolar-below-f", inst, max_excess(zip(table_bip, fvals)), tol0, ex)

    if include_sampled:
        rep.extend(_sampled_row_checks(row, tr, sampled or default_sample_grid(body.dim),
                                       L, tolerance, inst))
    return rep


def _sampled_row_checks(row, tr: TableRow, grid: Grid, L, tolerance, inst) -> Report:
    rep = Report()
    grid = _float_grid(grid)
    if L is None:
        L = lipschitz_bound(tr.polar[1].body)
    tol = float(2 * L * grid.h) if tolerance is None else tolerance
    s = sample(tr.func, grid)
    sup = polar_nonneg_sup(s, grid)
    inf = polar_general_inf_grid(s, grid)
    closed = sample(tr.polar[0], grid)
    finite = closed.values < INF
    rep.add(f"{row}:polar:sup-form", inst,
            max_gap((sup.values[finite], closed.values[finite])), tol,
            detail="compared where the closed form is finite")
    rep.add(f"{row}:polar:sup-form-inner", inst, max_excess((sup.values, closed.values)),
            FLOAT_TOL)
    rep.add(f"{row}:polar:inf-form", inst, max_gap((inf.values, sup.values)), 0)
    ineq = polar_inequality_check(s, grid, grid, sup, inst).checks[0]
    rep.add(f"{row}:polar-inequality", inst, ineq.discrepancy, FLOAT_TOL)
    foo = polar_nonneg_sup(sup, grid)
    rep.add(f"{row}:bipolar:sup-form-below-f", inst,
            max_excess((foo.values, s.values)), FLOAT_TOL)
    return rep


def sampled_agreement(f, primal: Grid, dual: Grid) -> tuple:
    """Worst gap between the sup form and the inf form, and the polar
    inequality excess, for one nonnegative function."""
    s = _sampled(f, primal)
    sup = polar_nonneg_sup(s, dual)
    inf = polar_general_inf_grid(s, dual)
    gap = max_gap((sup.values, inf.values))
    ineq = polar_inequality_check(s, primal, dual, sup).checks[0].discrepancy
    return gap, ineq


__all__ = [
    "TransformResult",
    "UnsupportedFunction",
    "NegativeValueError",
    "fenchel_conjugate_grid",
    "fenchel_conjugate_exact",
    "conjugate_zero_level_set",
    "fenchel_subdifferential_grid",
    "polar_nonneg_sup",
    "polar_general_inf",
    "polar_general_inf_grid",
    "reverse_polar_grid",
    "lambda_interval",
    "polar_exact",
    "bipolar_transform",
    "polar_inequality_check",
    "table_row",
    "TABLE_ROWS",
    "verify_table_row",
    "lipschitz_bound",
    "sampled_agreement",
]
