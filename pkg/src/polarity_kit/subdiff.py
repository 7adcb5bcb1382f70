"""Polar subdifferentials and alignment of vectors w.r.t. a polar pair.

For ``f >= 0`` on a primal grid and its polar ``f°`` on a dual grid:

* lower:  ``y`` with ``f°(y) = <x,y>_+ (lower*) f(x)^-1``;
* upper:  ``y`` with ``f(x) = <x,y>_+ (lower*) f°(y)^-1``;
* middle: ``y`` with ``<x,y>_+ = f(x) (upper*) f°(y)``.

Memberships are decided at dual nodes, so the results are node sets that
approximate the true subdifferentials from inside.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from . import extarith as ea
from ._linalg import dot
from .extarith import INF
from .funcrep import Grid, Sampled
from .geometry import (
    ConvexBody,
    NotBipolarError,
    exposed_face_contains,
    normal_cone_contains,
    polar_set,
    support_eval,
)
from .report import Report
from .transforms import _sampled, polar_nonneg_sup


class SubdiffResult(NamedTuple):
    kind: str
    base_point: tuple
    members: frozenset

    def __contains__(self, y):
        return tuple(y) in self.members

    def __len__(self):
        return len(self.members)


def _setup(f, x, dual, primal, fo):
    s = _sampled(f, primal)
    i = s.grid.index(x)
    if i is None:
        raise ValueError(f"{tuple(x)} is not a primal node")
    if fo is None:
        fo = polar_nonneg_sup(s, dual)
    x = s.grid.nodes[i]
    return s, s.values[i], fo, x


def _close(a, b, tol):
    if a == b:
        return True
    if tol == 0 or a == INF or b == INF:
        return False
    return abs(a - b) <= tol


def _pos_pairing(x, y):
    s = dot(x, y)
    return s if s > 0 else 0


def lower_polar_subdiff(f, x, dual: Grid, primal: Grid | None = None,
                        fo: Sampled | None = None, tol=0) -> SubdiffResult:
    s, fx, fo, x = _setup(f, x, dual, primal, fo)
    members = frozenset(y for y, v in zip(dual.nodes, fo.values)
                        if _close(v, ea.lower_div(_pos_pairing(x, y), fx), tol))
    return SubdiffResult("lower", x, members)


def upper_polar_subdiff(f, x, dual: Grid, primal: Grid | None = None,
                        fo: Sampled | None = None, tol=0) -> SubdiffResult:
    s, fx, fo, x = _setup(f, x, dual, primal, fo)
    members = frozenset(y for y, v in zip(dual.nodes, fo.values)
                        if _close(fx, ea.lower_div(_pos_pairing(x, y), v), tol))
    return SubdiffResult("upper", x, members)


def middle_polar_subdiff(f, x, dual: Grid, primal: Grid | None = None,
                         fo: Sampled | None = None, tol=0,
                         alternate: bool = False) -> SubdiffResult:
    """Middle polar subdifferential.

    ``alternate=True`` drops the positive part, i.e. tests
    ``<x,y> = f(x) (upper*) f°(y)``. The two agree whenever the product is
    positive; they can differ at pairs with ``<x,y> < 0`` and a zero product.
    """
    s, fx, fo, x = _setup(f, x, dual, primal, fo)
    pair = dot if alternate else _pos_pairing
    members = frozenset(y for y, v in zip(dual.nodes, fo.values)
                        if _close(pair(x, y), ea.upper_mul(fx, v), tol))
    return SubdiffResult("middle-alternate" if alternate else "middle", x, members)


def lower_subdiff_argmax(f, x, dual: Grid, primal: Grid | None = None,
                         fo: Sampled | None = None) -> frozenset:
    """Dual nodes ``y`` for which ``x`` attains the sup defining ``f°(y)``."""
    s, fx, fo, x = _setup(f, x, dual, primal, fo)
    return frozenset(y for y, v in zip(dual.nodes, fo.values)
                     if ea.lower_div(_pos_pairing(x, y), fx) == v)


def subdiff_differences(f, x, dual: Grid, primal: Grid | None = None) -> dict:
    """Pairwise set differences of the three subdifferentials at ``x``.

    No containment is asserted. This is a descriptive summary only.
    """
    s = _sampled(f, primal)
    fo = polar_nonneg_sup(s, dual)
    sets = {k: fn(s, x, dual, fo=fo).members for k, fn in
            (("lower", lower_polar_subdiff), ("upper", upper_polar_subdiff),
             ("middle", middle_polar_subdiff))}
    out = {}
    for a in sets:
        for b in sets:
            if a != b:
                out[f"{a}-minus-{b}"] = len(sets[a] - sets[b])
    return out


def upper_tightness_check(f, primal: Grid, dual: Grid, tolerance=0,
                          instance: str = "") -> Report:
    """Wherever the upper subdifferential is nonempty, ``f°°(x) = f(x)``.

    Both transforms are grid sup forms; the check covers every primal node
    and reports how many had a nonempty upper subdifferential.
    """
    s = _sampled(f, primal)
    fo = polar_nonneg_sup(s, dual)
    foo = polar_nonneg_sup(fo, primal)
    worst, count = 0, 0
    for x, fx, v in zip(primal.nodes, s.values, foo.values):
        if upper_polar_subdiff(s, x, dual, fo=fo).members:
            count += 1
            g = 0 if fx == v else (INF if INF in (fx, v) else abs(fx - v))
            worst = max(worst, g)
    rep = Report()
    rep.add("subdiff:upper-implies-tight", instance, worst, tolerance,
            primal.exact and dual.exact, f"{count} of {primal.size} nodes with nonempty upper subdifferential")
    return rep


# ---------------------------------------------------------------------------
# Alignment
# ---------------------------------------------------------------------------


def check_polar_pair(P: ConvexBody, D: ConvexBody) -> None:
    if not (polar_set(P) == D and polar_set(D) == P):
        raise NotBipolarError("(P, D) is not a polar pair")


def is_aligned(P: ConvexBody, D: ConvexBody, x, y, check: bool = True) -> bool:
    """``0 < <x,y>`` and ``<x,y> = sigma_D(x) (upper*) sigma_P(y)``."""
    if check:
        check_polar_pair(P, D)
    s = dot(P._vec(x), P._vec(y))
    return s > 0 and s == ea.upper_mul(support_eval(D, x), support_eval(P, y))


CLAUSES = (
    "aligned",
    "product",
    "face-D-normalised",
    "face-D",
    "normal-D",
    "normal-D-normalised",
    "face-P-normalised",
    "face-P",
    "normal-P",
    "normal-P-normalised",
)


def alignment_clauses(P: ConvexBody, D: ConvexBody, x, y, sD=None, sP=None):
    """Every clause of the alignment equivalence chain at ``(x, y)``.

    Returns ``None`` when ``sigma_D(x)`` or ``sigma_P(y)`` is not in
    ``(0, +inf)``: the face clauses are then undefined (precondition
    excluded), and alignment must be false.
    """
    x = P._vec(x)
    y = P._vec(y)
    a = support_eval(D, x) if sD is None else sD
    b = support_eval(P, y) if sP is None else sP
    if not (0 < a < INF and 0 < b < INF):
        return None
    xh = tuple(c / a for c in x)
    yh = tuple(c / b for c in y)
    s = dot(x, y)

    def normal(body, point, direction):
        return body.contains(point) and normal_cone_contains(body, point, direction)

    return {
        "aligned": is_aligned(P, D, x, y, check=False),
        "product": s == a * b,
        "face-D-normalised": exposed_face_contains(D, xh, yh),
        "face-D": exposed_face_contains(D, x, yh),
        "normal-D": normal(D, yh, x),
        "normal-D-normalised": normal(D, yh, xh),
        "face-P-normalised": exposed_face_contains(P, yh, xh),
        "face-P": exposed_face_contains(P, y, xh),
        "normal-P": normal(P, xh, y),
        "normal-P-normalised": normal(P, xh, yh),
    }


def alignment_equivalence_report(P: ConvexBody, D: ConvexBody, samples: Iterable | None = None,
                                 primal: Grid | None = None, dual: Grid | None = None,
                                 instance: str = "") -> Report:
    """Evaluate the alignment chain and the middle-subdifferential dichotomy.

    Either ``samples`` (``(x, y)`` pairs, closed-form middle subdifferentials)
    or both grids (every node pair, grid middle subdifferentials) are given.
    Checks emitted:

    * ``alignment:clause-agreement``: all clauses of the chain agree;
    * ``alignment:middle-symmetry``: ``y`` in the middle subdifferential of
      ``sigma_D`` at ``x`` iff ``x`` in that of ``sigma_P`` at ``y``;
    * ``alignment:middle-dichotomy``: membership iff ``<x,y> = 0`` or aligned;
    * ``alignment:middle-degenerate-branch``: membership iff aligned or both
      ``<x,y>_+`` and ``sigma_D(x) (upper*) sigma_P(y)`` vanish.

    With bounded polar pairs the last two differ exactly at nonzero
    orthogonal pairs, where the product is positive and membership fails.
    """
    check_polar_pair(P, D)
    if primal is not None and dual is not None and samples is None:
        if P.exact and D.exact and primal.exact and dual.exact:
            counts = _grid_kernel(P, D, primal, dual)
        else:
            counts = _generic_counts(P, D, grid_pairs(primal, dual), primal, dual)
    else:
        counts = _generic_counts(P, D, samples, primal, dual)
    n, excluded, bad, sym, dich, degen = counts
    rep = Report()
    rep.add("alignment:clause-agreement", instance, bad, 0, True,
            f"{n} pairs, {excluded} precondition-excluded")
    rep.add("alignment:middle-symmetry", instance, sym, 0, True, f"{n} pairs")
    rep.add("alignment:middle-dichotomy", instance, dich, 0, True, f"{n} pairs")
    rep.add("alignment:middle-degenerate-branch", instance, degen, 0, True, f"{n} pairs")
    return rep


def _sup_cache(body):
    cache = {}

    def ev(x):
        if x not in cache:
            cache[x] = support_eval(body, x)
        return cache[x]
    return ev


def _generic_counts(P, D, samples, primal, dual):
    """Pair-by-pair evaluation through the geometry primitives."""
    samples = [(tuple(x), tuple(y)) for x, y in samples]
    sD, sP = _sup_cache(D), _sup_cache(P)
    mid_D, mid_P = _middle_oracles(P, D, primal, dual, sD, sP)
    excluded = bad = sym = dich = degen = 0
    for x, y in samples:
        a, b = sD(x), sP(y)
        cl = alignment_clauses(P, D, x, y, a, b)
        aligned = is_aligned(P, D, x, y, check=False)
        if cl is None:
            excluded += 1
            bad += aligned
        elif len(set(cl.values())) != 1:
            bad += 1
        s = dot(P._vec(x), P._vec(y))
        m1, m2 = mid_D(x, y), mid_P(x, y)
        sym += m1 != m2
        dich += m1 != (s == 0 or aligned)
        degen += m1 != (aligned or (s <= 0 and ea.upper_mul(a, b) == 0))
    return len(samples), excluded, bad, sym, dich, degen


def _middle_oracles(P, D, primal, dual, sD, sP):
    if primal is None or dual is None:
        def mid_D(x, y):
            return _pos_pairing(P._vec(x), P._vec(y)) == ea.upper_mul(sD(x), sP(y))

        def mid_P(x, y):
            return _pos_pairing(P._vec(x), P._vec(y)) == ea.upper_mul(sP(y), sD(x))
        return mid_D, mid_P

    from .funcrep import SupportOf, sample
    fD = sample(SupportOf(D), primal)
    fP = sample(SupportOf(P), dual)
    foD = polar_nonneg_sup(fD, dual)
    foP = polar_nonneg_sup(fP, primal)
    cacheD, cacheP = {}, {}

    def mid_D(x, y):
        if x not in cacheD:
            cacheD[x] = middle_polar_subdiff(fD, x, dual, fo=foD).members
        return _key(dual, y) in cacheD[x]

    def mid_P(x, y):
        if y not in cacheP:
            cacheP[y] = middle_polar_subdiff(fP, y, primal, fo=foP).members
        return _key(primal, x) in cacheP[y]

    return mid_D, mid_P


# Exact all-pairs kernel. Every rational is written as an integer over one
# common denominator per vector, so pair comparisons become integer outer
# products.


def _int_over(vals):
    fr = [Fraction(v) for v in vals]
    d = math.lcm(*(f.denominator for f in fr))
    return np.array([f.numerator * (d // f.denominator) for f in fr], dtype=object), d


class _Pairing(NamedTuple):
    num: np.ndarray
    den: int

    @classmethod
    def of(cls, primal: Grid, dual: Grid):
        X, dx = _int_over(c for x in primal.nodes for c in x)
        Y, dy = _int_over(c for y in dual.nodes for c in y)
        X = X.reshape(len(primal.nodes), primal.dim)
        Y = Y.reshape(len(dual.nodes), dual.dim)
        return cls(X @ Y.T, dx * dy)

    def vs_product(self, u, v, op):
        """``op(<x_i, y_j>, u_i (upper*) v_j)`` for nonnegative ``u``, ``v``."""
        uinf = np.array([a == INF for a in u])
        vinf = np.array([b == INF for b in v])
        un, ud = _int_over(0 if a == INF else a for a in u)
        vn, vd = _int_over(0 if b == INF else b for b in v)
        res = op(self.num * (ud * vd), np.multiply.outer(un, vn) * self.den).astype(bool)
        res[uinf, :] = False
        res[:, vinf] = False
        return res


def _grid_kernel(P, D, primal, dual):
    from .funcrep import SupportOf, sample
    X, Y = primal.nodes, dual.nodes
    S = _Pairing.of(primal, dual)
    pos = S.num > 0
    a = [support_eval(D, x) for x in X]
    b = [support_eval(P, y) for y in Y]
    for v in a + b:
        if v < 0:
            raise NotBipolarError("negative support value: the pair does not contain 0")
    row_ok = np.array([0 < v < INF for v in a])
    col_ok = np.array([0 < v < INF for v in b])
    ok = np.logical_and.outer(row_ok, col_ok)

    xh = [tuple(c / v for c in x) if f else None for x, v, f in zip(X, a, row_ok)]
    yh = [tuple(c / v for c in y) if f else None for y, v, f in zip(Y, b, col_ok)]
    in_P = np.array([f and P.contains(p) for p, f in zip(xh, row_ok)], dtype=bool)
    in_D = np.array([f and D.contains(q) for q, f in zip(yh, col_ok)], dtype=bool)
    ac = [v * support_eval(D, p) if f else 0 for v, p, f in zip(a, xh, row_ok)]
    bd = [v * support_eval(P, q) if f else 0 for v, q, f in zip(b, yh, col_ok)]
    ones_a = [v if f else 0 for v, f in zip(a, row_ok)]
    ones_b = [v if f else 0 for v, f in zip(b, col_ok)]

    eq = S.vs_product(ones_a, ones_b, np.equal)
    ge = S.vs_product(ones_a, ones_b, np.greater_equal)
    ge_c = S.vs_product(ac, ones_b, np.greater_equal)
    ge_d = S.vs_product(ones_a, bd, np.greater_equal)
    mD = in_D[None, :]
    mP = in_P[:, None]
    clauses = [
        pos & eq,          # aligned
        eq,                # product
        mD & ge_c,         # face-D-normalised
        mD & ge,           # face-D
        mD & ge,           # normal-D
        mD & ge_c,         # normal-D-normalised
        mP & ge_d,         # face-P-normalised
        mP & ge,           # face-P
        mP & ge,           # normal-P
        mP & ge_d,         # normal-P-normalised
    ]
    stack = np.stack(clauses)
    disagree = ok & (stack.any(axis=0) != stack.all(axis=0))

    # excluded pairs: alignment must be false; checked through the generic path
    bad = int(disagree.sum())
    for i, j in zip(*np.nonzero(~ok)):
        bad += is_aligned(P, D, X[i], Y[j], check=False)
    aligned = np.zeros_like(ok)
    aligned[ok] = clauses[0][ok]

    fD = sample(SupportOf(D), primal)
    fP = sample(SupportOf(P), dual)
    foD = polar_nonneg_sup(fD, dual)
    foP = polar_nonneg_sup(fP, primal)
    pos_num = np.where(pos, S.num, 0)
    posS = _Pairing(pos_num, S.den)
    mid_D = posS.vs_product(list(fD.values), list(foD.values), np.equal)
    mid_P = posS.vs_product(list(foP.values), list(fP.values), np.equal)

    zero_prod = np.logical_or.outer(np.array([v == 0 for v in a]), np.array([v == 0 for v in b]))
    inf_prod = np.logical_or.outer(np.array([v == INF for v in a]), np.array([v == INF for v in b]))
    degenerate = ~pos & zero_prod & ~inf_prod
    n = ok.size
    return (n, int((~ok).sum()), bad, int((mid_D != mid_P).sum()),
            int((mid_D != ((S.num == 0) | aligned)).sum()),
            int((mid_D != (aligned | degenerate)).sum()))


def _key(grid, v):
    i = grid.index(v)
    return grid.nodes[i] if i is not None else None


def grid_pairs(primal: Grid, dual: Grid | None = None):
    dual = dual or primal
    return [(x, y) for x in primal.nodes for y in dual.nodes]


__all__ = [
    "SubdiffResult",
    "lower_polar_subdiff",
    "upper_polar_subdiff",
    "middle_polar_subdiff",
    "lower_subdiff_argmax",
    "subdiff_differences",
    "upper_tightness_check",
    "is_aligned",
    "alignment_clauses",
    "alignment_equivalence_report",
    "check_polar_pair",
    "grid_pairs",
    "CLAUSES",
]
