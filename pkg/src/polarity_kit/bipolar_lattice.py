"""Bipolar functions, their lattice, and the correspondence with bipolar sets.

A bipolar function is a lower semicontinuous gauge. It is the gauge of a
bipolar set ``P`` and the support function of ``D = P°``. Every
:class:`BipolarFunction` carries that polar pair, so meets, joins and the
maps ``phi`` / ``theta`` are computed on sets, exactly.

Only finite families are supported.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from . import extarith as ea
from .extarith import INF, NEG_INF
from .funcrep import FuncRep, Grid, MinkowskiOf, Sampled, SupportOf, sample
from .geometry import (
    ConvexBody,
    NotBipolarError,
    is_bipolar_set,
    polar_set,
    set_join,
    set_meet,
)
from .report import Report, max_excess, max_gap
from .transforms import bipolar_transform, conjugate_zero_level_set, polar_nonneg_sup


def _with_generators(body: ConvexBody) -> ConvexBody:
    return body.canonical()


class BipolarFunction(FuncRep):
    """A lsc gauge with its polar-pair witness ``(P, D)``.

    ``func`` is either ``MinkowskiOf(P)`` or ``SupportOf(D)``; both evaluate to
    the same values.
    """

    variant = "bipolar"

    def __init__(self, func: FuncRep, P: ConvexBody, D: ConvexBody, validate: bool = True):
        if not isinstance(func, (SupportOf, MinkowskiOf)):
            raise TypeError("a bipolar function is a SupportOf or MinkowskiOf closed form")
        self.func = func
        self.P = P
        self.D = D
        self.dim = P.dim
        if validate:
            self.validate()

    @classmethod
    def from_support(cls, D: ConvexBody) -> "BipolarFunction":
        _require(D)
        return cls(SupportOf(D), _with_generators(polar_set(D)), D)

    @classmethod
    def from_gauge(cls, P: ConvexBody) -> "BipolarFunction":
        _require(P)
        return cls(MinkowskiOf(P), P, _with_generators(polar_set(P)))

    def validate(self):
        for name, body in (("P", self.P), ("D", self.D)):
            cert = is_bipolar_set(body)
            if not cert.valid:
                raise NotBipolarError(f"witness {name} is not bipolar (contains_zero is false)")
        if not polar_set(self.P) == self.D or not polar_set(self.D) == self.P:
            raise NotBipolarError("witness sets are not a polar pair")

    def gauge(self) -> MinkowskiOf:
        return MinkowskiOf(self.P)

    def support(self) -> SupportOf:
        return SupportOf(self.D)

    def __call__(self, x):
        return self.func(x)

    def same_function(self, other: "BipolarFunction") -> bool:
        """Equality as functions, decided exactly on the witnesses."""
        return self.D == other.D

    def __repr__(self):
        return f"BipolarFunction({self.func!r})"


def _require(body):
    cert = is_bipolar_set(body)
    if not cert.contains_zero:
        raise NotBipolarError(f"not a bipolar set (contains_zero is false): {body!r}")


def iso_phi(P: ConvexBody) -> BipolarFunction:
    """Bipolar set ``P`` to its gauge."""
    return BipolarFunction.from_gauge(P)


def iso_theta(f: BipolarFunction | FuncRep) -> ConvexBody:
    """Bipolar function to the polar of the zero level set of its conjugate."""
    func = f.func if isinstance(f, BipolarFunction) else f
    return _with_generators(polar_set(conjugate_zero_level_set(func)))


def func_meet(f: BipolarFunction, g: BipolarFunction) -> BipolarFunction:
    """Greatest bipolar minorant of ``f`` and ``g``: support of ``D_f ∩ D_g``."""
    D = _with_generators(set_meet(f.D, g.D))
    return BipolarFunction(SupportOf(D), _with_generators(polar_set(D)), D, validate=False)


def func_join(f: BipolarFunction, g: BipolarFunction) -> BipolarFunction:
    """Pointwise max of ``f`` and ``g``: support of the hull of ``D_f ∪ D_g``."""
    D = _with_generators(set_join(f.D, g.D))
    return BipolarFunction(SupportOf(D), _with_generators(polar_set(D)), D, validate=False)


# ---------------------------------------------------------------------------
# Infimal convolution on a grid
# ---------------------------------------------------------------------------


def _integer_coords(grid: Grid) -> np.ndarray:
    """Node coordinates in units of the step; requires 0 to be a node."""
    cols = []
    for i in range(grid.dim):
        start, h = grid._starts[i], grid._steps[i]
        off = start / h
        k0 = int(round(off))
        if abs(off - k0) > 1e-9:
            raise ValueError("infimal convolution on a grid needs the origin as a node")
        cols.append(k0)
    idx = np.indices(grid.shape).reshape(grid.dim, -1).T
    return idx + np.array(cols)


def inf_convolution_grid(f, g, grid: Grid | None = None) -> Sampled:
    """``(f □ g)(x) = min over nodes u, v with u + v = x of f(u) (upper+) g(v)``."""
    fs = f if isinstance(f, Sampled) and grid is None else sample(f, grid or f.grid)
    grid = fs.grid
    gs = sample(g, grid)
    K = _integer_coords(grid)
    lo = K.min(axis=0)
    shape = np.array(grid.shape)
    strides = np.array([int(np.prod(grid.shape[i + 1:])) for i in range(grid.dim)])
    fv, gv = fs.values, gs.values
    exact = grid.exact
    out = []
    for kx in K:
        diff = kx[None, :] - K
        pos = diff - lo
        ok = np.all((pos >= 0) & (pos < shape), axis=1)
        u_idx = np.nonzero(ok)[0]
        v_idx = pos[ok] @ strides
        if exact:
            best = INF
            for a, b in zip(fv[u_idx], gv[v_idx]):
                s = ea.upper_add(a, b)
                if s < best:
                    best = s
            out.append(best)
        else:
            out.append(ea.upper_add_array(fv[u_idx], gv[v_idx]).min(initial=INF))
    return Sampled(grid, out)


def sandwich_check(f: BipolarFunction, g: BipolarFunction, grid: Grid,
                   instance: str = "") -> Report:
    """``f ∧ g <= f □ g <= min(f, g)`` at every node (tolerance 0)."""
    meet = sample(func_meet(f, g).func, grid)
    conv = inf_convolution_grid(f.func, g.func, grid)
    fs, gs = sample(f.func, grid), sample(g.func, grid)
    mins = [min(a, b) for a, b in zip(fs.values, gs.values)]
    rep = Report()
    ex = grid.exact
    rep.add("sandwich:meet-below-infconv", instance,
            max_excess(zip(meet.values, conv.values)), 0, ex)
    rep.add("sandwich:infconv-below-min", instance,
            max_excess(zip(conv.values, mins)), 0, ex)
    return rep


# ---------------------------------------------------------------------------
# Membership test
# ---------------------------------------------------------------------------


def _scaled_node(grid, x, lam):
    y = tuple(lam * c for c in x)
    return grid.index(y)


def is_bipolar_function(f: FuncRep, grid: Grid, tolerance=0, seed: int = 0,
                        pairs: int = 400, instance: str = "") -> Report:
    """Grid battery for membership in the class of bipolar functions.

    Clauses: nonnegativity, ``f(0) = 0``, 1-homogeneity for scalings
    ``1/2, 2, 3`` landing on nodes, midpoint convexity on node pairs (all
    pairs in 1D, ``pairs`` seeded random pairs otherwise) and ``f°° = f``.
    The last clause is exact for closed forms; for samples it uses two grid
    passes with ``tolerance``.
    """
    inst = instance or repr(f)
    rep = Report()
    func = f.func if isinstance(f, BipolarFunction) else f
    s = sample(func, grid)
    vals = s.values
    ex = grid.exact

    rep.add_bool("bipolar-function:nonnegative", inst, bool(np.all(vals >= 0)),
                 "negative value at some node")
    o = grid.origin_index
    rep.add_bool("bipolar-function:zero-at-origin", inst, o is not None and vals[o] == 0,
                 f"f(0) = {vals[o] if o is not None else 'n/a'}")

    half = Fraction(1, 2) if ex else 0.5
    worst = 0
    for lam in (half, 2, 3):
        for i, x in enumerate(grid.nodes):
            j = _scaled_node(grid, x, lam)
            if j is None:
                continue
            a, b = vals[j], ea.upper_mul(lam, vals[i]) if vals[i] >= 0 else lam * vals[i]
            worst = max(worst, _gap(a, b))
    rep.add("bipolar-function:homogeneous", inst, worst, 0 if ex else 1e-9, ex)

    worst = 0
    for x, y in _pairs(grid, seed, pairs):
        m = tuple((a + b) / 2 for a, b in zip(x, y))
        k = grid.index(m)
        if k is None:
            continue
        fx, fy = s(x), s(y)
        rhs = ea.upper_add(fx, fy)
        rhs = rhs / 2 if rhs not in (INF, NEG_INF) else rhs
        if vals[k] > rhs:
            worst = max(worst, _gap(vals[k], rhs))
    rep.add("bipolar-function:midpoint-convex", inst, worst, 0 if ex else 1e-9, ex)

    if isinstance(func, (SupportOf, MinkowskiOf)):
        body = func.body
        cert = is_bipolar_set(body)
        rep.add_bool("bipolar-function:witness-certificate", inst, cert.valid,
                     "witness body is not bipolar (contains_zero is false)")
        foo = sample(bipolar_transform(func).func, grid)
        rep.add("bipolar-function:bipolar-fixed-point", inst,
                max_gap(zip(foo.values, vals)), 0 if ex else 1e-9, ex)
    else:
        if np.all(vals >= 0):
            fo = polar_nonneg_sup(s, grid)
            foo = polar_nonneg_sup(fo, grid)
            gap = max_gap(zip(foo.values, vals))
        else:
            gap = INF
        rep.add("bipolar-function:bipolar-fixed-point", inst, gap, tolerance, ex)
    return rep


def _gap(a, b):
    if a == b:
        return 0
    if a in (INF, NEG_INF) or b in (INF, NEG_INF):
        return INF
    return abs(a - b)


def _pairs(grid, seed, count):
    nodes = grid.nodes
    if grid.dim == 1 or len(nodes) ** 2 <= count:
        for x in nodes:
            for y in nodes:
                yield x, y
        return
    rng = random.Random(seed)
    for _ in range(count):
        yield rng.choice(nodes), rng.choice(nodes)


def lattice_isomorphism_check(P: ConvexBody, Q: ConvexBody, probe: Grid | None = None,
                              instance: str = "") -> Report:
    """``phi`` turns meets of sets into joins of functions and vice versa;
    ``theta`` inverts it. Decided exactly on witnesses, optionally also at
    probe nodes."""
    rep = Report()
    fP, fQ = iso_phi(P), iso_phi(Q)
    meet_set = set_meet(P, Q)
    join_set = set_join(P, Q)
    lhs1, rhs1 = iso_phi(_with_generators(meet_set)), func_join(fP, fQ)
    lhs2, rhs2 = iso_phi(_with_generators(join_set)), func_meet(fP, fQ)
    rep.add_bool("lattice:phi-meet-to-join", instance, lhs1.same_function(rhs1))
    rep.add_bool("lattice:phi-join-to-meet", instance, lhs2.same_function(rhs2))
    rep.add_bool("lattice:theta-phi", instance, iso_theta(fP) == P and iso_theta(fQ) == Q)
    rep.add_bool("lattice:phi-theta", instance,
                 iso_phi(iso_theta(rhs1)).same_function(rhs1)
                 and iso_phi(iso_theta(rhs2)).same_function(rhs2))
    if probe is not None:
        nodes = probe.nodes
        for name, a, b in (("phi-meet-to-join", lhs1, rhs1), ("phi-join-to-meet", lhs2, rhs2)):
            gap = max_gap((a.gauge()(x), b.support()(x)) for x in nodes)
            rep.add(f"lattice:{name}:probe", instance, gap, 0, probe.exact)
    return rep
