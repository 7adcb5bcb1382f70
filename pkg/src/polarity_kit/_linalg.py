"""Small dense linear algebra for exact (integer/Fraction) and float vectors.

Only tiny matrices occur (ambient dimension at most 3, so homogenised
vectors have at most 4 entries), so everything is plain Python.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np

FLOAT_TOL = 1e-9


def to_fraction(v) -> Fraction:
    """Exact rational from an int, Fraction, float or ``"p/q"`` string.

    Floats go through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite coordinate {v!r}")
        return Fraction(repr(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, np.integer):
        return Fraction(int(v))
    if isinstance(v, np.floating):
        return to_fraction(float(v))
    raise TypeError(f"cannot read {v!r} as a rational")


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = m
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * det(minor)
    return total


def cofactor_vector(rows):
    """Vector orthogonal to ``n-1`` rows of length ``n`` (generalised cross product).

    It is zero exactly when the rows are linearly dependent.
    """
    n = len(rows) + 1
    out = []
    for j in range(n):
        minor = [tuple(r[:j]) + tuple(r[j + 1:]) for r in rows]
        out.append((-1) ** j * det(minor))
    return tuple(out)


def integer_row(row):
    """Positive rescaling of a rational row to a primitive integer row."""
    fr = [to_fraction(c) for c in row]
    lcm = 1
    for c in fr:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in fr]
    return primitive(ints)


def primitive(ints):
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g == 0:
        return tuple(ints)
    return tuple(c // g for c in ints)


def normalise_float(v, tol=FLOAT_TOL):
    m = max(abs(c) for c in v)
    if m <= tol:
        return None
    return tuple(0.0 if abs(c / m) <= tol else c / m + 0.0 for c in v)


def nullspace_exact(rows, n):
    """Basis of ``{z : r.z = 0 for r in rows}`` as primitive integer vectors."""
    m = [[to_fraction(c) for c in r] for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [c / p for c in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(integer_row(v))
    return basis


def nullspace_float(rows, n, tol=FLOAT_TOL):
    if not rows:
        return [tuple(float(c) for c in row) for row in np.eye(n)]
    a = np.asarray(rows, dtype=float)
    _, s, vt = np.linalg.svd(a)
    scale = max(1.0, s[0] if len(s) else 1.0)
    rank = int(np.sum(s > tol * scale))
    return [normalise_float(tuple(v)) for v in vt[rank:]]


def cone_generators(rows, n, exact=True, tol=FLOAT_TOL):
    """Generators of the polyhedral cone ``{z in R^n : r.z <= 0 for r in rows}``.

    Returns ``(rays, lineality)``: the extreme rays of the pointed part
    (orthogonal to the lineality space) and a basis of the lineality space.
    In exact mode the vectors are primitive integer tuples. The cone equals
    ``cone(rays) + span(lineality)``.

    An extreme ray is the one-dimensional solution set of ``n-1-k`` active
    rows stacked with the ``k`` lineality basis vectors. So every such
    subset is tried and the resulting direction kept when feasible.
    """
    if exact:
        rows = [integer_row(r) for r in rows]
        rows = [r for r in rows if any(r)]
        rows = list(dict.fromkeys(rows))
        lineality = nullspace_exact(rows, n)
        le = lambda s: s <= 0  # noqa: E731
        norm = primitive
    else:
        rows = [tuple(float(c) for c in r) for r in rows]
        rows = [normalise_float(r, tol) for r in rows]
        rows = [r for r in rows if r is not None]
        lineality = nullspace_float(rows, n, tol)
        le = lambda s: s <= tol  # noqa: E731
        norm = lambda v: normalise_float(v, tol)  # noqa: E731
    k = len(lineality)
    if k == n:
        return [], lineality
    rays = {}
    for subset in combinations(rows, n - 1 - k):
        v = cofactor_vector(list(subset) + list(lineality))
        v = norm(v)
        if v is None or not any(v):
            continue
        vals = [dot(r, v) for r in rows]
        if all(le(s) for s in vals):
            pass
        elif all(le(-s) for s in vals):
            v = tuple(-c for c in v)
        else:
            continue
        key = v if exact else tuple(round(c, 7) for c in v)
        rays.setdefault(key, v)
    return list(rays.values()), lineality
