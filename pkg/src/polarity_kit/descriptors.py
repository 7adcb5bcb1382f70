"""JSON descriptors for bodies, grids, functions and scenarios.

Rationals are JSON numbers or strings such as ``"3/4"``; extended values also
accept ``"inf"`` and ``"-inf"``. Every parse error names the offending field
as a path like ``functions.f.body.points[2][0]``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from ._linalg import to_fraction
from .extarith import INF, NEG_INF
from .funcrep import (
    FuncRep,
    GenIndicator,
    Grid,
    Indicator,
    MaxAffine,
    MinkowskiOf,
    Pointwise,
    Sampled,
    SupportOf,
    Valley,
)
from .geometry import ConvexBody, cross_polytope, square


class DescriptorError(ValueError):
    """Malformed input; ``path`` locates the field, or ``line:col`` for JSON syntax."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


def load_json(path, label: str | None = None):
    label = label or str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DescriptorError(label, f"cannot read file ({exc.strerror})") from None
    return loads(text, label)


def loads(text: str, label: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"{label}:{exc.lineno}:{exc.colno}", exc.msg) from None


# ---------------------------------------------------------------------------
# Scalars and vectors
# ---------------------------------------------------------------------------


def _rational(v, path, exact=True):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise DescriptorError(path, f"expected a rational number, got {type(v).__name__}")
    try:
        q = to_fraction(v)
    except (ValueError, ZeroDivisionError):
        raise DescriptorError(path, f"not a rational number: {v!r}") from None
    return q if exact else float(q)


def _extended(v, path, exact=True):
    if v in ("inf", "+inf"):
        return INF
    if v == "-inf":
        return NEG_INF
    if isinstance(v, float) and v in (INF, NEG_INF):
        return v
    return _rational(v, path, exact)


def _vector(v, path, dim=None, exact=True):
    if not isinstance(v, list):
        raise DescriptorError(path, "expected a list of coordinates")
    if dim is not None and len(v) != dim:
        raise DescriptorError(path, f"expected {dim} coordinates, got {len(v)}")
    return tuple(_rational(c, f"{path}[{i}]", exact) for i, c in enumerate(v))


def _obj(d, path):
    if not isinstance(d, dict):
        raise DescriptorError(path, "expected an object")
    return d


def _get(d, key, path, default=KeyError):
    if key in d:
        return d[key]
    if default is KeyError:
        raise DescriptorError(f"{path}.{key}" if path else key, "missing field")
    return default


def format_value(v):
    """JSON-friendly extended rational: ints stay ints, other rationals become
    ``"p/q"`` strings, infinities ``"inf"`` / ``"-inf"``."""
    if v == INF:
        return "inf"
    if v == NEG_INF:
        return "-inf"
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


# ---------------------------------------------------------------------------
# Bodies
# ---------------------------------------------------------------------------


def simplex(dim: int = 2, exact=None) -> ConvexBody:
    """``conv{0, e_1, ..., e_dim}``."""
    pts = [(0,) * dim] + [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    return ConvexBody.from_points(pts, exact=exact)


def orthant(dim: int = 2, exact=None) -> ConvexBody:
    """Nonnegative orthant as a cone."""
    rays = [tuple(1 if j == i else 0 for j in range(dim)) for i in range(dim)]
    return ConvexBody(dim, points=[(0,) * dim], rays=rays, exact=exact)


NAMED_BODIES = {
    "square": lambda r, d, ex: square(r, d),
    "cross": lambda r, d, ex: cross_polytope(r, d),
    "triangle": lambda r, d, ex: simplex(d, ex).scaled(r),
    "quadrant": lambda r, d, ex: orthant(d, ex),
    "origin": lambda r, d, ex: ConvexBody.origin(d, ex),
    "whole": lambda r, d, ex: ConvexBody.whole_space(d, ex),
}


def parse_body(d, path="body", exact=True, refs=None) -> ConvexBody:
    """Body descriptor.

    One of ``{"named": "square", "radius": 1, "dim": 2}``,
    ``{"points": [...], "rays": [...]}`` or
    ``{"halfspaces": [[a_1, ..., a_d, b], ...]}`` (meaning ``<a, x> <= b``).
    A bare string refers to a body declared elsewhere in the scenario.
    """
    if isinstance(d, str):
        if refs is not None and d in refs:
            return refs[d]
        if d in NAMED_BODIES:
            return parse_body({"named": d}, path, exact)
        raise DescriptorError(path, f"unknown body {d!r}")
    d = _obj(d, path)
    ex = exact
    if "named" in d:
        name = d["named"]
        if name not in NAMED_BODIES:
            raise DescriptorError(f"{path}.named",
                                  f"unknown body {name!r}; expected one of {', '.join(NAMED_BODIES)}")
        r = _rational(d.get("radius", 1), f"{path}.radius")
        if r <= 0:
            raise DescriptorError(f"{path}.radius", "must be positive")
        dim = _dim(d.get("dim", 2), f"{path}.dim")
        body = NAMED_BODIES[name](r, dim, ex)
        return body if ex else body.with_exact(False)
    if "halfspaces" in d:
        rows = _get(d, "halfspaces", path)
        if not isinstance(rows, list):
            raise DescriptorError(f"{path}.halfspaces", "expected a list")
        dim = d.get("dim")
        if dim is None:
            if not rows:
                raise DescriptorError(f"{path}.dim", "needed when there are no halfspaces")
            dim = len(rows[0]) - 1 if isinstance(rows[0], list) else None
        dim = _dim(dim, f"{path}.dim")
        hs = []
        for i, row in enumerate(rows):
            v = _vector(row, f"{path}.halfspaces[{i}]", dim + 1, ex)
            hs.append((v[:-1], v[-1]))
        return ConvexBody.from_halfspaces(hs, dim=dim, exact=ex)
    if "points" in d or "rays" in d:
        pts = d.get("points", [])
        rays = d.get("rays", [])
        for key, val in (("points", pts), ("rays", rays)):
            if not isinstance(val, list):
                raise DescriptorError(f"{path}.{key}", "expected a list")
        dim = d.get("dim")
        if dim is None:
            first = (pts or rays)
            if not first:
                raise DescriptorError(f"{path}.dim", "needed for an empty body")
            dim = len(first[0]) if isinstance(first[0], list) else None
        dim = _dim(dim, f"{path}.dim")
        P = [_vector(p, f"{path}.points[{i}]", dim, ex) for i, p in enumerate(pts)]
        R = [_vector(r, f"{path}.rays[{i}]", dim, ex) for i, r in enumerate(rays)]
        if not P and R:
            raise DescriptorError(f"{path}.points", "a body with rays needs at least one point")
        if not P:
            return ConvexBody.empty(dim, exact=ex)
        return ConvexBody(dim, points=P, rays=R, exact=ex)
    raise DescriptorError(path, "expected one of the fields named, points, rays, halfspaces")


def _dim(v, path):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise DescriptorError(path, "expected a positive integer dimension")
    return v


def body_to_json(body: ConvexBody) -> dict:
    b = body.canonical()
    out = {"dim": b.dim,
           "points": [[format_value(c) for c in p] for p in b.points],
           "rays": [[format_value(c) for c in r] for r in b.rays]}
    out["halfspaces"] = [[format_value(c) for c in a] + [format_value(rhs)]
                         for a, rhs in b.halfspaces]
    return out


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


def parse_grid(d, path="grid", exact=True) -> Grid:
    """``{"lo": -3, "hi": 3, "step": "1/2", "dim": 2}`` or
    ``{"axes": [[lo, hi, count], ...]}``."""
    d = _obj(d, path)
    ex = bool(d.get("exact", exact)) and exact
    try:
        if "axes" in d:
            axes = d["axes"]
            if not isinstance(axes, list) or not axes:
                raise DescriptorError(f"{path}.axes", "expected a nonempty list")
            out = []
            for i, ax in enumerate(axes):
                p = f"{path}.axes[{i}]"
                if not isinstance(ax, list) or len(ax) != 3:
                    raise DescriptorError(p, "expected [lo, hi, count]")
                lo, hi = _rational(ax[0], p + "[0]"), _rational(ax[1], p + "[1]")
                if isinstance(ax[2], bool) or not isinstance(ax[2], int):
                    raise DescriptorError(p + "[2]", "node count must be an integer")
                out.append((lo, hi, ax[2]))
            return Grid(out, exact=ex)
        lo = _rational(_get(d, "lo", path), f"{path}.lo")
        hi = _rational(_get(d, "hi", path), f"{path}.hi")
        step = _rational(_get(d, "step", path), f"{path}.step")
        if step <= 0:
            raise DescriptorError(f"{path}.step", "must be positive")
        dim = _dim(d.get("dim", 1), f"{path}.dim")
        return Grid.regular(lo, hi, step, dim, exact=ex)
    except DescriptorError:
        raise
    except ValueError as exc:
        raise DescriptorError(path, str(exc)) from None


# ---------------------------------------------------------------------------
# Functions
# ---------------------------------------------------------------------------


_BODY_VARIANTS = {
    "support": SupportOf,
    "minkowski": MinkowskiOf,
    "indicator": Indicator,
    "gen-indicator": GenIndicator,
    "valley": Valley,
}

FUNCTION_VARIANTS = tuple(_BODY_VARIANTS) + (
    "max-affine", "norm", "quadratic", "constant", "min", "sampled")


def parse_function(d, path="function", exact=True, bodies=None, grids=None,
                   funcs=None) -> FuncRep:
    """Function descriptor; ``variant`` selects the representation.

    * ``support`` / ``minkowski`` / ``indicator`` / ``gen-indicator`` /
      ``valley`` with a ``body``;
    * ``max-affine`` with ``pieces: [[slope, intercept], ...]`` and an
      optional ``domain`` body;
    * ``norm`` with ``p`` in ``1, 2, "inf"`` and ``dim``;
    * ``quadratic``: ``scale * |x|^2``;
    * ``constant`` with ``value`` (may be ``"inf"``) and ``dim``;
    * ``min`` of a list ``of`` function descriptors;
    * ``sampled`` with a ``grid`` and row-major ``values``.
    """
    if isinstance(d, str):
        if funcs is not None and d in funcs:
            return funcs[d]
        raise DescriptorError(path, f"unknown function {d!r}")
    d = _obj(d, path)
    variant = _get(d, "variant", path)
    if variant in _BODY_VARIANTS:
        body = parse_body(_get(d, "body", path), f"{path}.body", exact, bodies)
        return _BODY_VARIANTS[variant](body)
    if variant == "max-affine":
        pieces = _get(d, "pieces", path)
        if not isinstance(pieces, list) or not pieces:
            raise DescriptorError(f"{path}.pieces", "expected a nonempty list")
        out = []
        for i, pc in enumerate(pieces):
            p = f"{path}.pieces[{i}]"
            if not isinstance(pc, list) or len(pc) != 2:
                raise DescriptorError(p, "expected [slope, intercept]")
            slope = pc[0] if isinstance(pc[0], list) else [pc[0]]
            out.append((_vector(slope, p + "[0]", None, exact), _rational(pc[1], p + "[1]", exact)))
        dim = len(out[0][0])
        for i, (a, _) in enumerate(out):
            if len(a) != dim:
                raise DescriptorError(f"{path}.pieces[{i}][0]", f"expected {dim} coordinates")
        dom = d.get("domain")
        dom = None if dom is None else parse_body(dom, f"{path}.domain", exact, bodies)
        return MaxAffine(out, domain=dom, dim=dim, exact=exact)
    if variant == "norm":
        p = d.get("p", 2)
        dim = _dim(d.get("dim", 1), f"{path}.dim")
        if p in (1, "inf", "+inf"):
            # |x|_1 is the support of the max-norm ball and vice versa
            body = square(1, dim) if p == 1 else cross_polytope(1, dim)
            return SupportOf(body if exact else body.with_exact(False))
        if p == 2:
            return Pointwise(lambda x: float(sum(float(c) ** 2 for c in x)) ** 0.5, dim, "l2-norm")
        raise DescriptorError(f"{path}.p", "expected 1, 2 or \"inf\"")
    if variant == "quadratic":
        a = _rational(d.get("scale", 1), f"{path}.scale", exact)
        dim = _dim(d.get("dim", 1), f"{path}.dim")
        return Pointwise(lambda x: a * sum(c * c for c in x), dim, f"quadratic({format_value(a)})")
    if variant == "constant":
        v = _extended(_get(d, "value", path), f"{path}.value", exact)
        dim = _dim(d.get("dim", 1), f"{path}.dim")
        return Pointwise(lambda x: v, dim, f"constant({format_value(v)})")
    if variant == "min":
        parts = _get(d, "of", path)
        if not isinstance(parts, list) or not parts:
            raise DescriptorError(f"{path}.of", "expected a nonempty list")
        fs = [parse_function(p, f"{path}.of[{i}]", exact, bodies, grids, funcs)
              for i, p in enumerate(parts)]
        dims = {f.dim for f in fs}
        if len(dims) != 1:
            raise DescriptorError(f"{path}.of", "all members need the same dimension")
        return Pointwise(lambda x: min(f(x) for f in fs), dims.pop(),
                         "min(" + ", ".join(repr(f) for f in fs) + ")")
    if variant == "sampled":
        g = _get(d, "grid", path)
        if isinstance(g, str):
            if grids is None or g not in grids:
                raise DescriptorError(f"{path}.grid", f"unknown grid {g!r}")
            grid = grids[g]
        else:
            grid = parse_grid(g, f"{path}.grid", exact)
        vals = _get(d, "values", path)
        if not isinstance(vals, list):
            raise DescriptorError(f"{path}.values", "expected a list")
        if len(vals) != grid.size:
            raise DescriptorError(f"{path}.values",
                                  f"expected {grid.size} values for the grid, got {len(vals)}")
        return Sampled(grid, [_extended(v, f"{path}.values[{i}]", grid.exact)
                              for i, v in enumerate(vals)])
    raise DescriptorError(f"{path}.variant",
                          f"unknown variant {variant!r}; expected one of {', '.join(FUNCTION_VARIANTS)}")


def sampled_to_json(s: Sampled) -> dict:
    return {"grid": s.grid.to_json(), "values": [format_value(v) for v in s.values]}


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


class Scenario:
    """Named bodies, grids and functions plus a list of checks."""

    def __init__(self, id, bodies, grids, functions, checks, seed=0, raw=None):
        self.id = id
        self.bodies = bodies
        self.grids = grids
        self.functions = functions
        self.checks = checks
        self.seed = seed
        self.raw = raw

    def __repr__(self):
        return f"Scenario({self.id!r}, {len(self.checks)} checks)"


def parse_scenario(d, exact=True, label="scenario") -> Scenario:
    d = _obj(d, "")
    sid = d.get("id", label)
    if not isinstance(sid, str):
        raise DescriptorError("id", "expected a string")
    bodies, grids, funcs = {}, {}, {}
    for section in ("bodies", "grids", "functions"):
        if not isinstance(d.get(section, {}), dict):
            raise DescriptorError(section, "expected an object of named entries")
    for name, bd in d.get("bodies", {}).items():
        bodies[name] = parse_body(bd, f"bodies.{name}", exact, bodies)
    for name, gd in d.get("grids", {}).items():
        grids[name] = parse_grid(gd, f"grids.{name}", exact)
    for name, fd in d.get("functions", {}).items():
        funcs[name] = parse_function(fd, f"functions.{name}", exact, bodies, grids, funcs)
    checks = d.get("checks", [])
    if not isinstance(checks, list):
        raise DescriptorError("checks", "expected a list")
    for i, c in enumerate(checks):
        p = f"checks[{i}]"
        _obj(c, p)
        _get(c, "kind", p)
        tol = c.get("tolerance")
        if tol is not None and _rational(tol, f"{p}.tolerance") < 0:
            raise DescriptorError(f"{p}.tolerance", "must be nonnegative")
        for key, table in (("body", bodies), ("P", bodies), ("D", bodies), ("Q", bodies),
                           ("function", funcs), ("grid", grids), ("primal", grids),
                           ("dual", grids)):
            ref = c.get(key)
            if isinstance(ref, str) and ref not in table and not (
                    table is bodies and ref in NAMED_BODIES):
                raise DescriptorError(f"{p}.{key}", f"unresolved name {ref!r}")
    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise DescriptorError("seed", "expected an integer")
    return Scenario(sid, bodies, grids, funcs, checks, seed, d)


__all__ = [
    "DescriptorError",
    "load_json",
    "loads",
    "parse_body",
    "parse_grid",
    "parse_function",
    "parse_scenario",
    "Scenario",
    "body_to_json",
    "sampled_to_json",
    "format_value",
    "simplex",
    "orthant",
    "NAMED_BODIES",
    "FUNCTION_VARIANTS",
]
