"""Polyhedral convex bodies in R^d (d <= 3) and their polarity.

A :class:`ConvexBody` is stored by generators (points and rays, the set
being ``conv(points) + cone(rays)``), by halfspaces ``<a, x> <= b``, or both.
The missing form is computed on demand by homogenising and enumerating the
extreme rays of a polyhedral cone (:func:`polarity_kit._linalg.cone_generators`).

Dimensions 1 and 2 use exact rationals by default; dimension 3 uses floats
with tolerance ``1e-9``.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

from . import _linalg
from ._linalg import FLOAT_TOL, dot, to_fraction
from .extarith import INF, NEG_INF

__all__ = [
    "ConvexBody",
    "BipolarCertificate",
    "NotBipolarError",
    "EmptyPolarWarning",
    "polar_set",
    "polar_cone",
    "bipolar_set",
    "is_bipolar_set",
    "set_meet",
    "set_join",
    "support_eval",
    "minkowski_eval",
    "exposed_face",
    "normal_cone_contains",
    "exposed_face_contains",
    "hull_with_origin",
    "intersection",
    "hull_union",
    "square",
    "cross_polytope",
]


class NotBipolarError(ValueError):
    """Raised when a lattice operation receives a set that is not bipolar."""


class EmptyPolarWarning(UserWarning):
    """The polar of the empty set was requested; it is the whole space."""


class ConvexBody:
    """Closed convex polyhedron in R^d.

    Parameters
    ----------
    dim : int
        Ambient dimension (1, 2 or 3).
    points, rays : sequences of d-vectors, optional
        Generator form. ``points`` empty means the empty set.
    halfspaces : sequence of ``(a, b)`` pairs, optional
        Constraint form ``<a, x> <= b``. An empty sequence is all of R^d.
    exact : bool, optional
        Rational arithmetic. Defaults to ``dim <= 2``.

    Bodies are immutable. ``==`` is set equality (mutual containment)
    so bodies are not hashable.
    """

    __hash__ = None  # type: ignore[assignment]

    def __init__(self, dim: int, points=None, rays=None, halfspaces=None,
                 exact: bool | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        self.exact = (self.dim <= 2) if exact is None else bool(exact)
        self.tol = 0 if self.exact else FLOAT_TOL
        if points is None and rays is None and halfspaces is None:
            raise ValueError("a body needs generators or halfspaces")
        if points is not None or rays is not None:
            pts = tuple(self._vec(p) for p in (points or ()))
            rys = tuple(self._vec(r) for r in (rays or ()))
            rys = tuple(r for r in rys if any(self._nz(c) for c in r))
            self.__dict__["_generators"] = (_dedupe(pts, self), _dedupe(rys, self))
        if halfspaces is not None:
            hs = []
            for a, b in halfspaces:
                hs.append((self._vec(a), self._num(b)))
            self.__dict__["_halfspaces"] = tuple(hs)

    # -- construction helpers -------------------------------------------------
    def _num(self, v):
        return to_fraction(v) if self.exact else float(v)

    def _vec(self, v):
        v = tuple(self._num(c) for c in v)
        if len(v) != self.dim:
            raise ValueError(f"expected a {self.dim}-vector, got {len(v)} entries")
        return v

    def _nz(self, c) -> bool:
        return abs(c) > self.tol

    def _le(self, a, b) -> bool:
        return a <= b + self.tol

    @classmethod
    def from_points(cls, points, rays=(), dim=None, exact=None):
        points = [tuple(p) for p in points]
        if dim is None:
            if not points and not rays:
                raise ValueError("dimension needed for an empty generator list")
            dim = len(points[0]) if points else len(rays[0])
        return cls(dim, points=points, rays=rays, exact=exact)

    @classmethod
    def from_halfspaces(cls, halfspaces, dim=None, exact=None):
        halfspaces = [(tuple(a), b) for a, b in halfspaces]
        if dim is None:
            if not halfspaces:
                raise ValueError("dimension needed for an empty constraint list")
            dim = len(halfspaces[0][0])
        return cls(dim, halfspaces=halfspaces, exact=exact)

    @classmethod
    def whole_space(cls, dim, exact=None):
        return cls(dim, halfspaces=(), exact=exact)

    @classmethod
    def origin(cls, dim, exact=None):
        hs = []
        for i in range(dim):
            e = [0] * dim
            e[i] = 1
            hs.append((tuple(e), 0))
            e[i] = -1
            hs.append((tuple(e), 0))
        body = cls(dim, points=[(0,) * dim], halfspaces=hs, exact=exact)
        return body

    @classmethod
    def empty(cls, dim, exact=None):
        return cls(dim, points=(), rays=(), halfspaces=[((0,) * dim, -1)], exact=exact)

    def with_exact(self, exact: bool) -> "ConvexBody":
        """Same set in the other arithmetic; every cached form is converted."""
        if exact == self.exact:
            return self
        kw = {}
        if "_generators" in self.__dict__:
            kw["points"], kw["rays"] = self._generators
        if "_halfspaces" in self.__dict__:
            kw["halfspaces"] = self._halfspaces
        return ConvexBody(self.dim, exact=exact, **kw)

    # -- the two representations ---------------------------------------------
    @property
    def points(self):
        return self._generators[0]

    @property
    def rays(self):
        return self._generators[1]

    @property
    def halfspaces(self):
        return self._halfspaces

    @cached_property
    def _generators(self):
        return _h_to_v(self)

    @cached_property
    def _halfspaces(self):
        return _v_to_h(self)

    # -- predicates ----------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return not self.points

    @property
    def is_bounded(self) -> bool:
        return not self.rays

    def contains(self, x) -> bool:
        x = self._vec(x)
        return all(self._le(dot(a, x), b) for a, b in self.halfspaces)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def contains_ray(self, r) -> bool:
        """Whether direction ``r`` lies in the recession cone."""
        r = self._vec(r)
        return all(self._le(dot(a, r), 0) for a, _ in self.halfspaces)

    def issubset(self, other: "ConvexBody") -> bool:
        _same_dim(self, other)
        if self.is_empty:
            return True
        tol = max(self.tol, other.tol)
        for a, b in other.halfspaces:
            for p in self.points:
                if dot(a, p) > b + tol:
                    return False
            for r in self.rays:
                if dot(a, r) > tol:
                    return False
        return True

    def __le__(self, other):
        return self.issubset(other)

    def __ge__(self, other):
        return other.issubset(self)

    def __eq__(self, other):
        if not isinstance(other, ConvexBody):
            return NotImplemented
        return self.dim == other.dim and self.issubset(other) and other.issubset(self)

    def canonical(self) -> "ConvexBody":
        """Body with minimal generators and facet constraints."""
        body = ConvexBody(self.dim, halfspaces=self.halfspaces, exact=self.exact)
        body.__dict__["_generators"] = body._generators
        return body

    def scaled(self, lam) -> "ConvexBody":
        """``lam * body`` for ``lam > 0``."""
        lam = self._num(lam)
        if not lam > 0:
            raise ValueError("scale must be positive")
        return ConvexBody(self.dim, points=[tuple(lam * c for c in p) for p in self.points],
                          rays=self.rays, exact=self.exact)

    def to_json(self):
        fmt = _fmt_exact if self.exact else float
        return {
            "dim": self.dim,
            "points": [[fmt(c) for c in p] for p in self.points],
            "rays": [[fmt(c) for c in r] for r in self.rays],
        }

    def __repr__(self):
        return (f"ConvexBody(dim={self.dim}, points={[tuple(map(str, p)) for p in self.points]}, "
                f"rays={[tuple(map(str, r)) for r in self.rays]})")


def _fmt_exact(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _same_dim(a, b):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def _dedupe(vectors, body):
    if body.exact:
        return tuple(dict.fromkeys(vectors))
    out = []
    for v in vectors:
        if not any(max(abs(a - b) for a, b in zip(v, w)) <= body.tol for w in out):
            out.append(v)
    return tuple(out)


def _h_to_v(body: ConvexBody):
    d = body.dim
    rows = [tuple(a) + (-b,) for a, b in body.halfspaces]
    rows.append((0,) * d + (-1,))
    rays, lin = _linalg.cone_generators(rows, d + 1, exact=body.exact, tol=body.tol or FLOAT_TOL)
    num = to_fraction if body.exact else float
    pts, out_rays = [], []
    for z in rays:
        t = z[-1]
        if abs(t) > body.tol:
            pts.append(tuple(num(c) / num(t) for c in z[:-1]))
        else:
            out_rays.append(tuple(num(c) for c in z[:-1]))
    for z in lin:
        r = tuple(num(c) for c in z[:-1])
        out_rays.append(r)
        out_rays.append(tuple(-c for c in r))
    if not pts:
        return (), ()
    return _dedupe(tuple(pts), body), _dedupe(tuple(out_rays), body)


def _v_to_h(body: ConvexBody):
    d = body.dim
    if body.is_empty:
        return (((0,) * d, -1),) if body.exact else (((0.0,) * d, -1.0),)
    rows = [tuple(p) + (1,) for p in body.points] + [tuple(r) + (0,) for r in body.rays]
    rays, lin = _linalg.cone_generators(rows, d + 1, exact=body.exact, tol=body.tol or FLOAT_TOL)
    num = to_fraction if body.exact else float
    hs = []
    for z in rays:
        a = tuple(num(c) for c in z[:-1])
        if any(abs(c) > body.tol for c in a):
            hs.append((a, -num(z[-1])))
    for z in lin:
        a = tuple(num(c) for c in z[:-1])
        if any(abs(c) > body.tol for c in a):
            hs.append((a, -num(z[-1])))
            hs.append((tuple(-c for c in a), num(z[-1])))
    return tuple(hs)


# ---------------------------------------------------------------------------
# Standard bodies
# ---------------------------------------------------------------------------


def square(r=1, dim=2) -> ConvexBody:
    """``[-r, r]^dim``: the unit ball of the max norm, scaled."""
    from itertools import product as _prod
    return ConvexBody.from_points([tuple(s * r for s in signs)
                                   for signs in _prod((1, -1), repeat=dim)])


def cross_polytope(r=1, dim=2) -> ConvexBody:
    """``{|x|_1 <= r}``: the polar of the unit max-norm ball when r = 1."""
    pts = []
    for i in range(dim):
        for s in (1, -1):
            e = [0] * dim
            e[i] = s * r
            pts.append(tuple(e))
    return ConvexBody.from_points(pts)


# ---------------------------------------------------------------------------
# Polarity
# ---------------------------------------------------------------------------


def polar_set(body: ConvexBody) -> ConvexBody:
    """``{y : <x, y> <= 1 for all x in body}`` in constraint form."""
    if body.is_empty:
        warnings.warn("polar of the empty set is the whole space", EmptyPolarWarning,
                      stacklevel=2)
        return ConvexBody.whole_space(body.dim, exact=body.exact)
    hs = [(p, 1) for p in body.points if any(body._nz(c) for c in p)]
    hs += [(r, 0) for r in body.rays]
    return ConvexBody(body.dim, halfspaces=hs, exact=body.exact)


def polar_cone(body: ConvexBody) -> ConvexBody:
    """``{y : <x, y> <= 0 for all x in body}`` in constraint form."""
    if body.is_empty:
        warnings.warn("polar of the empty set is the whole space", EmptyPolarWarning,
                      stacklevel=2)
        return ConvexBody.whole_space(body.dim, exact=body.exact)
    hs = [(g, 0) for g in body.points + body.rays if any(body._nz(c) for c in g)]
    return ConvexBody(body.dim, halfspaces=hs, exact=body.exact)


def hull_with_origin(body: ConvexBody) -> ConvexBody:
    zero = (0,) * body.dim
    return ConvexBody(body.dim, points=body.points + (zero,), rays=body.rays,
                      exact=body.exact)


def bipolar_set(body: ConvexBody, check: bool | None = None) -> ConvexBody:
    """Closed convex hull of ``body`` together with the origin.

    This is the double polar. In exact mode both routes are computed and
    compared unless ``check=False``.
    """
    hull = hull_with_origin(body)
    if check is None:
        check = body.exact
    if check:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyPolarWarning)
            double = polar_set(polar_set(body))
        if not hull == double:
            raise AssertionError(f"double polar disagrees with hull for {body!r}")
    return hull


class BipolarCertificate(NamedTuple):
    body: ConvexBody
    contains_zero: bool
    closed_convex: bool

    @property
    def valid(self) -> bool:
        return self.contains_zero and self.closed_convex

    def __bool__(self):
        return self.valid


def is_bipolar_set(body: ConvexBody) -> BipolarCertificate:
    """Bipolar sets are the closed convex sets containing 0.

    Polyhedral bodies are always closed and convex, so only the origin
    needs checking.
    """
    return BipolarCertificate(body, body.contains((0,) * body.dim), True)


def _require_bipolar(*bodies):
    for b in bodies:
        cert = is_bipolar_set(b)
        if not cert.contains_zero:
            raise NotBipolarError(f"not a bipolar set (contains_zero is false): {b!r}")
        if not cert.closed_convex:
            raise NotBipolarError(f"not a bipolar set (closed_convex is false): {b!r}")


def set_meet(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Intersection of two bipolar sets."""
    _require_bipolar(a, b)
    _same_dim(a, b)
    exact = a.exact and b.exact
    return ConvexBody(a.dim, halfspaces=a.halfspaces + b.halfspaces, exact=exact)


def set_join(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Closed convex hull of the union of two bipolar sets."""
    _require_bipolar(a, b)
    _same_dim(a, b)
    exact = a.exact and b.exact
    return ConvexBody(a.dim, points=a.points + b.points, rays=a.rays + b.rays, exact=exact)


def intersection(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    _same_dim(a, b)
    return ConvexBody(a.dim, halfspaces=a.halfspaces + b.halfspaces, exact=a.exact and b.exact)


def hull_union(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    _same_dim(a, b)
    return ConvexBody(a.dim, points=a.points + b.points, rays=a.rays + b.rays,
                      exact=a.exact and b.exact)


# ---------------------------------------------------------------------------
# Evaluations
# ---------------------------------------------------------------------------


def _coerce(body, x):
    return body._vec(x)


def support_eval(body: ConvexBody, x: Sequence):
    """``sup_{p in body} <x, p>`` with values in ``[-inf, +inf]``."""
    x = _coerce(body, x)
    if body.is_empty:
        return NEG_INF
    if any(dot(x, r) > body.tol for r in body.rays):
        return INF
    return max(dot(x, p) for p in body.points)


def minkowski_eval(body: ConvexBody, x: Sequence):
    """Gauge ``inf{lam > 0 : x in lam * body}`` with ``inf of nothing = +inf``.

    Each constraint ``<a, z> <= b`` turns ``x in lam * body`` into a bound on
    ``lam``; the gauge is the least admissible positive ``lam``.
    """
    x = _coerce(body, x)
    lo, hi = 0, INF
    tol = body.tol
    for a, b in body.halfspaces:
        s = dot(a, x)
        if abs(b) <= tol:
            if s > tol:
                return INF
        elif b > 0:
            lo = max(lo, s / b)
        else:
            hi = min(hi, s / b)
    if hi <= tol or lo > hi + tol:
        return INF
    return lo


def exposed_face(body: ConvexBody, y: Sequence) -> ConvexBody:
    """Points of ``body`` maximising ``<., y>``."""
    y = _coerce(body, y)
    s = support_eval(body, y)
    if s == INF:
        raise ValueError("support infinite: the face in this direction is empty")
    if body.is_empty:
        return ConvexBody.empty(body.dim, exact=body.exact)
    pts = [p for p in body.points if dot(y, p) >= s - body.tol]
    rays = [r for r in body.rays if abs(dot(y, r)) <= body.tol]
    return ConvexBody(body.dim, points=pts, rays=rays, exact=body.exact)


def exposed_face_contains(body: ConvexBody, y: Sequence, z: Sequence) -> bool:
    """Whether ``z`` lies in the face of ``body`` exposed by ``y``, without
    building the face: ``z`` in the body and ``<z, y> >= sigma(y)``."""
    y = _coerce(body, y)
    z = _coerce(body, z)
    if not body.contains(z):
        return False
    s = support_eval(body, y)
    if s == INF:
        return False
    return dot(z, y) >= s - body.tol


def normal_cone_contains(body: ConvexBody, x: Sequence, y: Sequence) -> bool:
    """Whether ``y`` is normal to ``body`` at ``x``."""
    x = _coerce(body, x)
    y = _coerce(body, y)
    if not body.contains(x):
        raise ValueError(f"{x} is not a point of the body")
    tol = body.tol
    if any(dot(r, y) > tol for r in body.rays):
        return False
    return all(dot(tuple(pi - xi for pi, xi in zip(p, x)), y) <= tol for p in body.points)
