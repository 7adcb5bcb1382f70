"""Best lower approximations inside two classes of functions.

* :func:`best_convex_minorant`: the greatest lsc convex minorant, computed as
  the biconjugate plus the indicator of the closed convex hull of the domain
  (upper addition, node by node).
* :func:`best_homogeneous_convex_minorant`: the greatest lsc convex
  1-homogeneous minorant, the support function of ``[f* <= 0]``.

Being lsc is not something a finite grid can test; the closed-form outputs
(``SupportOf``, ``Valley``) are lsc by construction and grid outputs are node
tables.

:func:`linear_minorant_sup_oracle` is a brute-force inner approximation used
to cross-check the homogeneous case.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import extarith as ea
from .extarith import INF, NEG_INF
from .funcrep import FuncRep, Grid, Sampled, SupportOf, Valley, effective_domain
from .geometry import ConvexBody
from .transforms import (
    UnsupportedFunction,
    _pairing,
    _sampled,
    conjugate_zero_level_set,
    fenchel_conjugate_grid,
)


def _domain_hull(nodes, dim, exact) -> ConvexBody:
    nodes = list(nodes)
    if not nodes:
        return ConvexBody.empty(dim, exact=exact)
    return ConvexBody.from_points(nodes, exact=exact)


def _closed_cone(body: ConvexBody) -> ConvexBody:
    """Closed conical hull of a body that contains the origin."""
    if body.is_empty:
        return ConvexBody.origin(body.dim, exact=body.exact)
    rays = [p for p in body.points if any(p)] + list(body.rays)
    return ConvexBody(body.dim, points=[(0,) * body.dim], rays=rays, exact=body.exact)


def best_convex_minorant(f, primal: Grid | None = None, dual: Grid | None = None) -> FuncRep:
    """Greatest lsc convex minorant of ``f`` on the primal nodes.

    If ``f`` takes the value ``-inf`` somewhere it is not proper and the answer
    is the valley function of the closed convex hull of its domain. Otherwise
    two grid conjugations (primal to dual and back; ``dual`` defaults to the
    primal grid) give ``f**``, to which the indicator of the hull of the
    domain is added with upper addition.
    """
    s = _sampled(f, primal)
    primal = s.grid
    dual = dual or primal
    vals = s.values
    dom = [x for x, v in zip(primal.nodes, vals) if v < INF]
    hull = _domain_hull(dom, primal.dim, primal.exact)
    if not dom or any(v == NEG_INF for v in vals):
        return Valley(hull)
    fstar = fenchel_conjugate_grid(s, dual)
    fss = fenchel_conjugate_grid(fstar, primal)
    out = [ea.upper_add(v, 0 if hull.contains(x) else INF)
           for x, v in zip(primal.nodes, fss.values)]
    return Sampled(fss.grid, out)


class DomainError(ValueError):
    pass


def best_homogeneous_convex_minorant(f, primal: Grid | None = None,
                                     dual: Grid | None = None) -> FuncRep:
    """Greatest lsc convex 1-homogeneous minorant of ``f``; needs ``f(0) < +inf``.

    Without grids the zero level set of ``f*`` is computed exactly and a
    ``SupportOf`` (or ``Valley``) is returned. With a primal grid, ``f*`` is
    sampled on ``dual`` and the support values of the node set
    ``[f* <= 0]`` are tabulated on the primal nodes.

    ``dual`` defaults to the primal grid with twice the step. With equal
    steps the grid conjugate can vanish at spurious slopes: for ``x**2`` on
    step ``h`` it is ``0`` at ``y = h`` (attained at ``x = h``), which would
    put ``h`` in the level set.
    """
    if primal is None and not isinstance(f, Sampled):
        return _homogeneous_exact(f)
    s = _sampled(f, primal)
    primal = s.grid
    dual = dual or primal.coarsened(2)
    o = primal.origin_index
    if o is None:
        raise DomainError("the origin is not a primal node")
    if s.values[o] == INF:
        raise DomainError("f(0) = +inf: the origin must be in the domain")
    fstar = fenchel_conjugate_grid(s, dual)
    level = np.array([v <= 0 for v in fstar.values], dtype=bool)
    if not level.any():
        dom = [x for x, v in zip(primal.nodes, s.values) if v < INF]
        return Valley(_closed_cone(_domain_hull(dom, primal.dim, primal.exact)))
    S = _pairing(primal, fstar.grid)[:, level]
    return Sampled(primal, S.max(axis=1))


def _homogeneous_exact(f: FuncRep) -> FuncRep:
    o = (0,) * f.dim
    if f(o) == INF:
        raise DomainError("f(0) = +inf: the origin must be in the domain")
    try:
        Z = conjugate_zero_level_set(f)
    except UnsupportedFunction:
        raise UnsupportedFunction(f"no exact route for {f!r}; pass a grid") from None
    if not Z.is_empty:
        return SupportOf(Z)
    return Valley(_closed_cone(effective_domain(f)))


LAMBDA_LADDER = tuple(Fraction(2) ** k for k in range(-6, 7))


class OracleResult(NamedTuple):
    values: Sampled
    truncated: bool


def linear_minorant_sup_oracle(f, dual: Grid, lambdas: Sequence | None = None,
                               primal: Grid | None = None) -> OracleResult:
    """Pointwise sup of the functions ``lam * <., y>_+`` lying below ``f``.

    ``y`` ranges over the dual nodes and ``lam`` over ``lambdas`` (default a
    ladder of powers of two from ``2**-6`` to ``2**6``; that ladder is an
    oracle resolution, nothing more). A candidate is kept when it is below
    ``f`` at every primal node. ``truncated`` reports that the largest
    ``lam`` was admissible for some ``y`` pairing positively with some node,
    so the sup was capped by the ladder.
    """
    s = _sampled(f, primal)
    primal = s.grid
    exact = primal.exact and dual.exact
    lambdas = sorted(lambdas or LAMBDA_LADDER)
    if not exact:
        lambdas = [float(v) for v in lambdas]
    v = s.values if exact else s.values.astype(float)
    if any(x < 0 for x in v):
        raise ValueError("the oracle needs f >= 0")
    S = _pairing(primal, dual)
    Sp = np.where(S > 0, S, 0)
    best = np.zeros(len(primal.nodes), dtype=object if exact else float)
    truncated = False
    top = lambdas[-1]
    positive = (Sp > 0).any(axis=0)
    for lam in lambdas:
        cand = lam * Sp
        ok = (cand <= v[:, None]).all(axis=0)
        if not ok.any():
            continue
        best = np.maximum(best, cand[:, ok].max(axis=1))
        if lam == top and (ok & positive).any():
            truncated = True
    return OracleResult(Sampled(primal, list(best)), truncated)


__all__ = [
    "best_convex_minorant",
    "best_homogeneous_convex_minorant",
    "linear_minorant_sup_oracle",
    "OracleResult",
    "DomainError",
    "LAMBDA_LADDER",
]
