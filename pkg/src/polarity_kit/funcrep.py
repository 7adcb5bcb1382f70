"""Extended-real functions on R^d: closed forms and grid samples.

Every representation is callable on a d-vector and returns a value in
``[-inf, +inf]``. The closed forms are

* :class:`MaxAffine` -- ``max_i <s_i, x> + c_i`` on an optional domain;
* :class:`Indicator`, :class:`GenIndicator` (indicator plus one) and
  :class:`Valley` (``-inf`` on the body, ``+inf`` off it);
* :class:`SupportOf` and :class:`MinkowskiOf`, delegating to
  :mod:`polarity_kit.geometry`.

:class:`Sampled` holds one value per node of a :class:`Grid` and refuses
off-grid queries: nothing is interpolated.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from ._linalg import dot, to_fraction
from .extarith import INF, NEG_INF
from .geometry import (
    ConvexBody,
    intersection,
    minkowski_eval,
    polar_cone,
    support_eval,
)


class OffGridError(KeyError):
    """A sampled function was queried away from its grid nodes."""


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------


class Grid:
    """Cartesian product of uniform axes, ``(lo, hi, count)`` per axis.

    When an axis straddles the origin but 0 is not one of its nodes, the
    nodes are translated so that the nearest one lands on 0 (the step is
    kept). Many identities are anchored at the origin, so it has to be a node.

    Nodes are enumerated in row-major order (last axis fastest).
    """

    def __init__(self, axes: Sequence[tuple], exact: bool = True):
        if not axes:
            raise ValueError("a grid needs at least one axis")
        self.exact = bool(exact)
        num = to_fraction if self.exact else float
        self._starts, self._steps, self._counts = [], [], []
        for lo, hi, count in axes:
            lo, hi, count = num(lo), num(hi), int(count)
            if count < 2:
                raise ValueError("each axis needs at least 2 nodes")
            if hi <= lo:
                raise ValueError("axis bounds must satisfy lo < hi")
            h = (hi - lo) / (count - 1)
            start = lo
            if lo <= 0 <= hi:
                k = (0 - lo) / h
                start = -round(k) * h
            self._starts.append(start)
            self._steps.append(h)
            self._counts.append(count)
        self.dim = len(self._counts)
        self.shape = tuple(self._counts)
        self.size = int(np.prod(self.shape))

    @classmethod
    def regular(cls, lo, hi, step, dim=1, exact=True):
        """Axis ``lo, lo+step, ..., hi`` repeated ``dim`` times."""
        num = to_fraction if exact else float
        count = int(round((num(hi) - num(lo)) / num(step))) + 1
        return cls([(lo, hi, count)] * dim, exact=exact)

    def coarsened(self, factor: int = 2) -> "Grid":
        """Same window, ``factor`` times the step (the window may shrink by
        less than one new step at each end)."""
        axes = []
        for s, h, c in zip(self._starts, self._steps, self._counts):
            n = (c - 1) // factor
            axes.append((s, s + n * factor * h, n + 1))
        return Grid(axes, exact=self.exact)

    @property
    def steps(self):
        return tuple(self._steps)

    @property
    def h(self):
        return max(self._steps)

    def axis(self, i):
        s, h = self._starts[i], self._steps[i]
        return [s + k * h for k in range(self._counts[i])]

    @property
    def nodes(self):
        cached = self.__dict__.get("_nodes")
        if cached is None:
            cached = [tuple(n) for n in product(*(self.axis(i) for i in range(self.dim)))]
            self.__dict__["_nodes"] = cached
        return cached

    def node_array(self) -> np.ndarray:
        """``(size, dim)`` array of node coordinates (object dtype when exact)."""
        cached = self.__dict__.get("_node_array")
        if cached is None:
            dtype = object if self.exact else float
            cached = np.array(self.nodes, dtype=dtype).reshape(self.size, self.dim)
            self.__dict__["_node_array"] = cached
        return cached

    def index(self, x) -> int | None:
        """Flat index of node ``x`` or ``None`` when ``x`` is not a node."""
        if len(x) != self.dim:
            return None
        flat = 0
        for i, c in enumerate(x):
            if self.exact:
                try:
                    k = (to_fraction(c) - self._starts[i]) / self._steps[i]
                except (TypeError, ValueError):
                    return None
                if k.denominator != 1:
                    return None
                k = int(k)
            else:
                kf = (float(c) - self._starts[i]) / self._steps[i]
                k = int(round(kf))
                if abs(kf - k) > 1e-7:
                    return None
            if not 0 <= k < self._counts[i]:
                return None
            flat = flat * self._counts[i] + k
        return flat

    def __contains__(self, x):
        return self.index(x) is not None

    @property
    def origin_index(self):
        return self.index((0,) * self.dim)

    def with_exact(self, exact: bool) -> "Grid":
        g = Grid.__new__(Grid)
        num = to_fraction if exact else float
        g.exact = exact
        g._starts = [num(s) for s in self._starts]
        g._steps = [num(h) for h in self._steps]
        g._counts = list(self._counts)
        g.dim, g.shape, g.size = self.dim, self.shape, self.size
        return g

    def to_json(self):
        fmt = _fmt if self.exact else float
        return {"axes": [[fmt(self._starts[i]), fmt(self._starts[i] + (self._counts[i] - 1)
                                                       * self._steps[i]), self._counts[i]]
                         for i in range(self.dim)]}

    def __eq__(self, other):
        return (isinstance(other, Grid) and self.shape == other.shape
                and all(a == b for a, b in zip(self._starts, other._starts))
                and all(a == b for a, b in zip(self._steps, other._steps)))

    def __hash__(self):
        return hash(self.shape)

    def __repr__(self):
        return f"Grid({self.to_json()['axes']}, exact={self.exact})"


def _fmt(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Function representations
# ---------------------------------------------------------------------------


class FuncRep:
    """Base class. Subclasses implement ``__call__`` and set ``dim``."""

    dim: int
    variant = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def sample(self, grid: Grid) -> "Sampled":
        return sample(self, grid)

    def as_float(self) -> "FuncRep":
        """Copy evaluating in float arithmetic (used on float grids)."""
        return self


class MaxAffine(FuncRep):
    """``x -> max_i <slope_i, x> + intercept_i`` on ``domain`` (``+inf`` outside).

    With no pieces the function is ``-inf`` on the domain.
    """

    variant = "max-affine"

    def __init__(self, pieces, domain: ConvexBody | None = None, dim=None, exact=True):
        num = to_fraction if exact else float
        self.pieces = tuple((tuple(num(c) for c in s), num(b)) for s, b in pieces)
        if dim is None:
            if self.pieces:
                dim = len(self.pieces[0][0])
            elif domain is not None:
                dim = domain.dim
            else:
                raise ValueError("dimension needed for an empty piece list")
        self.dim = dim
        self.domain = domain
        self.exact = exact

    def as_float(self):
        if not self.exact:
            return self
        dom = self.domain.with_exact(False) if self.domain is not None else None
        return MaxAffine(self.pieces, dom, self.dim, exact=False)

    def __call__(self, x):
        if self.domain is not None and not self.domain.contains(x):
            return INF
        x = tuple(to_fraction(c) if self.exact else float(c) for c in x)
        return max((dot(s, x) + b for s, b in self.pieces), default=NEG_INF)


class _BodyFunction(FuncRep):
    def __init__(self, body: ConvexBody):
        self.body = body
        self.dim = body.dim

    def as_float(self):
        return self if not self.body.exact else type(self)(self.body.with_exact(False))

    def __repr__(self):
        return f"{type(self).__name__}({self.body!r})"


class Indicator(_BodyFunction):
    variant = "indicator"

    def __call__(self, x):
        return 0 if self.body.contains(x) else INF


class GenIndicator(_BodyFunction):
    """Indicator plus one: ``1`` on the body, ``+inf`` off it."""

    variant = "gen-indicator"

    def __call__(self, x):
        return 1 if self.body.contains(x) else INF


class Valley(_BodyFunction):
    variant = "valley"

    def __call__(self, x):
        return NEG_INF if self.body.contains(x) else INF


class SupportOf(_BodyFunction):
    variant = "support"

    def __call__(self, x):
        return support_eval(self.body, x)


class MinkowskiOf(_BodyFunction):
    variant = "minkowski"

    def __call__(self, x):
        return minkowski_eval(self.body, x)


class Pointwise(FuncRep):
    """Wrap a plain Python callable (used for hand-written test functions)."""

    variant = "callable"

    def __init__(self, fn: Callable, dim: int, name: str = "callable"):
        self.fn = fn
        self.dim = dim
        self.name = name

    def __call__(self, x):
        return self.fn(tuple(x))

    def __repr__(self):
        return f"Pointwise({self.name})"


class Sampled(FuncRep):
    """Values of a function at the nodes of a grid, in row-major order."""

    variant = "sampled"

    def __init__(self, grid: Grid, values):
        dtype = object if grid.exact else float
        vals = np.asarray(values, dtype=dtype).reshape(-1)
        if vals.size != grid.size:
            raise ValueError(f"expected {grid.size} values, got {vals.size}")
        if not grid.exact:
            if np.isnan(vals).any():
                raise ValueError("NaN values are not extended reals")
        else:
            vals = np.array([_exact_value(v) for v in vals], dtype=object)
        self.grid = grid
        self.values = vals
        self.dim = grid.dim

    def __call__(self, x):
        i = self.grid.index(x)
        if i is None:
            raise OffGridError(f"{tuple(x)} is not a node of {self.grid!r}")
        return self.values[i]

    def items(self):
        return zip(self.grid.nodes, self.values)

    def table(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def __repr__(self):
        return f"Sampled({self.grid!r})"


def _exact_value(v):
    if isinstance(v, float) and math.isinf(v):
        return v
    if isinstance(v, str) and v.strip() in ("inf", "+inf", "-inf"):
        return INF if v.strip() != "-inf" else NEG_INF
    return to_fraction(v)


def sample(f, grid: Grid) -> Sampled:
    """Evaluate ``f`` at every node of ``grid``."""
    if isinstance(f, Sampled):
        if f.grid == grid:
            return f
        return Sampled(grid, [f(x) for x in grid.nodes])
    if f.dim != grid.dim:
        raise ValueError(f"function of dimension {f.dim} on a {grid.dim}-d grid")
    if not grid.exact:
        f = f.as_float()
    vals = [f(x) for x in grid.nodes]
    if not grid.exact:
        vals = [float(v) for v in vals]
    return Sampled(grid, vals)


def shifted(f: FuncRep, c) -> FuncRep:
    """``f + c`` for finite ``c``; exact for the polyhedral closed forms."""
    if isinstance(f, MaxAffine):
        return MaxAffine([(s, b + c) for s, b in f.pieces], f.domain, f.dim, f.exact)
    if isinstance(f, SupportOf):
        return support_as_max_affine(f.body, shift=c)
    if isinstance(f, Indicator) and c == 1:
        return GenIndicator(f.body)
    if isinstance(f, Sampled):
        return Sampled(f.grid, [v + c for v in f.values])
    return Pointwise(lambda x: f(x) + c, f.dim, f"{f!r} + {c}")


def support_as_max_affine(body: ConvexBody, shift=0) -> MaxAffine:
    """``sigma_body + shift`` as a max-affine function with its finiteness domain."""
    if body.is_empty:
        return MaxAffine([], None, dim=body.dim, exact=body.exact)
    domain = None
    if body.rays:
        cone = ConvexBody(body.dim, points=[(0,) * body.dim], rays=body.rays, exact=body.exact)
        domain = polar_cone(cone)
    return MaxAffine([(p, shift) for p in body.points], domain, dim=body.dim,
                     exact=body.exact)


# ---------------------------------------------------------------------------
# Level sets
# ---------------------------------------------------------------------------


def _node_filter(f, grid, keep):
    if isinstance(f, Sampled) and (grid is None or f.grid == grid):
        s = f
    else:
        s = sample(f, grid)
    return frozenset(x for x, v in s.items() if keep(v))


def level_set(f: FuncRep, r, grid: Grid | None = None):
    """``{x : f(x) <= r}``.

    Polyhedral closed forms give an exact :class:`ConvexBody` unless a grid
    is passed; sampled functions (or any function with a grid) give a
    frozenset of nodes.
    """
    if grid is not None or isinstance(f, Sampled):
        return _node_filter(f, grid, lambda v: v <= r)
    body = _exact_level_set(f, r)
    if body is None:
        raise ValueError(f"no exact level set for {f!r}; pass a grid")
    return body


def strict_level_set(f: FuncRep, r, grid: Grid | None = None) -> frozenset:
    """``{x : f(x) < r}`` as a node set."""
    if grid is None and not isinstance(f, Sampled):
        raise ValueError("strict level sets are computed on grids only")
    return _node_filter(f, grid, lambda v: v < r)


def level_curve(f: FuncRep, r, grid: Grid | None = None) -> frozenset:
    """``{x : f(x) = r}`` as a node set."""
    if grid is None and not isinstance(f, Sampled):
        raise ValueError("level curves are computed on grids only")
    return _node_filter(f, grid, lambda v: v == r)


def _exact_level_set(f, r):
    d = f.dim
    exact = getattr(getattr(f, "body", None), "exact", getattr(f, "exact", True))
    whole = ConvexBody.whole_space(d, exact=exact)
    empty = ConvexBody.empty(d, exact=exact)
    if r == INF:
        return whole
    if isinstance(f, MaxAffine):
        if r == NEG_INF:
            if f.pieces:
                return empty
            return f.domain if f.domain is not None else whole
        hs = [(s, r - b) for s, b in f.pieces]
        body = ConvexBody(d, halfspaces=hs, exact=f.exact)
        return intersection(body, f.domain) if f.domain is not None else body
    if isinstance(f, Indicator):
        return f.body if r >= 0 else empty
    if isinstance(f, GenIndicator):
        return f.body if r >= 1 else empty
    if isinstance(f, Valley):
        return f.body
    if isinstance(f, SupportOf):
        b = f.body
        if b.is_empty:
            return whole
        if r == NEG_INF:
            return empty
        hs = [(p, r) for p in b.points] + [(ray, 0) for ray in b.rays]
        return ConvexBody(d, halfspaces=hs, exact=b.exact)
    if isinstance(f, MinkowskiOf):
        b = f.body
        if r < 0:
            return empty
        if not b.contains((0,) * d):
            return None
        if r == 0:
            return ConvexBody(d, points=[(0,) * d], rays=b.rays, exact=b.exact)
        return b.scaled(r)
    return None


def effective_domain(f: FuncRep, grid: Grid | None = None):
    """``{x : f(x) < +inf}``; exact for closed forms, node set on grids."""
    if grid is not None or isinstance(f, Sampled):
        return _node_filter(f, grid, lambda v: v < INF)
    if isinstance(f, (Indicator, GenIndicator, Valley)):
        return f.body
    if isinstance(f, MaxAffine):
        return f.domain if f.domain is not None else ConvexBody.whole_space(f.dim, f.exact)
    if isinstance(f, SupportOf):
        b = f.body
        if not b.rays:
            return ConvexBody.whole_space(f.dim, b.exact)
        cone = ConvexBody(b.dim, points=[(0,) * b.dim], rays=b.rays, exact=b.exact)
        return polar_cone(cone)
    raise ValueError(f"no exact domain for {f!r}; pass a grid")
