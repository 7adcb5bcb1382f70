"""Arithmetic on the two canonical enlargements used throughout the package.

Two totally ordered groups are enlarged with their endpoints:

* ``[0, +inf]``, the enlargement of ``(R_{++}, *)`` by ``0`` and ``+inf``;
* ``[-inf, +inf]``, the enlargement of ``(R, +)`` by ``-inf`` and ``+inf``.

Each comes with an *upper* and a *lower* composition that agree with the
group law on finite values and resolve the indeterminate clash
(``0 * inf`` resp. ``inf + -inf``) upward or downward.

Scalars are plain Python numbers: ``int``/``Fraction`` for exact values,
``float`` otherwise, and ``math.inf`` / ``-math.inf`` for the endpoints. No
rounding happens here, so comparisons are exact.

The two enlargements are written out separately on purpose, so that every
absorbing case stays visible in the code.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, NamedTuple, Union

import numpy as np

INF = math.inf
NEG_INF = -math.inf

ExtNonNeg = Union[int, Fraction, float]
ExtReal = Union[int, Fraction, float]


def is_pos_inf(a) -> bool:
    return a == INF


def is_neg_inf(a) -> bool:
    return a == NEG_INF


def is_finite(a) -> bool:
    return a != INF and a != NEG_INF


def check_nonneg(a) -> None:
    if not a >= 0:
        raise ValueError(f"{a!r} is not an element of [0, +inf]")


# ---------------------------------------------------------------------------
# [0, +inf] with upper/lower multiplication
# ---------------------------------------------------------------------------


def upper_mul(a: ExtNonNeg, b: ExtNonNeg) -> ExtNonNeg:
    """Upper multiplication: ``+inf`` absorbs everything, ``0 * +inf = +inf``."""
    if a == INF or b == INF:
        return INF
    if a == 0 or b == 0:
        return 0
    return a * b


def lower_mul(a: ExtNonNeg, b: ExtNonNeg) -> ExtNonNeg:
    """Lower multiplication: ``0`` absorbs everything, ``0 * +inf = 0``."""
    if a == 0 or b == 0:
        return 0
    if a == INF or b == INF:
        return INF
    return a * b


def lower_div(a: ExtNonNeg, b: ExtNonNeg) -> ExtNonNeg:
    """``a (lower*) b^-1``: a quotient in which ``0`` (or ``b = +inf``) wins."""
    if a == 0 or b == INF:
        return 0
    if a == INF or b == 0:
        return INF
    return a / b


def ext_inverse(a: ExtNonNeg) -> ExtNonNeg:
    """Multiplicative inverse extended by ``1/0 = +inf`` and ``1/+inf = 0``."""
    if a == 0:
        return INF
    if a == INF:
        return 0
    if isinstance(a, float):
        return 1.0 / a
    return Fraction(1) / a


# ---------------------------------------------------------------------------
# [-inf, +inf] with upper/lower addition
# ---------------------------------------------------------------------------


def upper_add(a: ExtReal, b: ExtReal) -> ExtReal:
    """Upper addition: ``+inf`` absorbs everything, ``+inf + -inf = +inf``."""
    if a == INF or b == INF:
        return INF
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def lower_add(a: ExtReal, b: ExtReal) -> ExtReal:
    """Lower addition: ``-inf`` absorbs everything, ``+inf + -inf = -inf``."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    if a == INF or b == INF:
        return INF
    return a + b


def ext_neg(a: ExtReal) -> ExtReal:
    """Group inverse of the additive enlargement (``-(+inf) = -inf``)."""
    return -a


def ext_inf(values: Iterable, top=INF):
    """Infimum of a finite family, with ``inf of nothing = top``."""
    return min(values, default=top)


def ext_sup(values: Iterable, bottom=NEG_INF):
    """Supremum of a finite family, with ``sup of nothing = bottom``."""
    return max(values, default=bottom)


# ---------------------------------------------------------------------------
# Vectorised forms over numpy arrays (float64 or object dtype)
# ---------------------------------------------------------------------------


def lower_mul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    dtype = object if object in (a.dtype, b.dtype) else float
    zero = (a == 0) | (b == 0)
    infinite = ~zero & ((a == INF) | (b == INF))
    finite = ~zero & ~infinite
    out = np.zeros(a.shape, dtype=dtype)
    out[infinite] = INF
    out[finite] = a[finite] * b[finite]
    return out


def upper_mul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    dtype = object if object in (a.dtype, b.dtype) else float
    infinite = (a == INF) | (b == INF)
    zero = ~infinite & ((a == 0) | (b == 0))
    finite = ~infinite & ~zero
    out = np.zeros(a.shape, dtype=dtype)
    out[infinite] = INF
    out[finite] = a[finite] * b[finite]
    return out


def ext_inverse_array(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    out = np.zeros(a.shape, dtype=a.dtype)
    zero = a == 0
    infinite = a == INF
    finite = ~zero & ~infinite
    out[zero] = INF
    if a.dtype == object:
        out[finite] = [Fraction(1) / v if not isinstance(v, float) else 1.0 / v
                       for v in a[finite]]
    else:
        out[finite] = 1.0 / a[finite]
    return out


def lower_div_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a (lower*) b^-1`` computed as a quotient, so finite entries round
    exactly like ``a / b``."""
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    dtype = object if object in (a.dtype, b.dtype) else float
    zero = (a == 0) | (b == INF)
    infinite = ~zero & ((a == INF) | (b == 0))
    finite = ~zero & ~infinite
    out = np.zeros(a.shape, dtype=dtype)
    out[infinite] = INF
    out[finite] = a[finite] / b[finite]
    return out


def upper_add_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
    dtype = object if object in (a.dtype, b.dtype) else float
    pos = (a == INF) | (b == INF)
    neg = ~pos & ((a == NEG_INF) | (b == NEG_INF))
    finite = ~pos & ~neg
    out = np.empty(a.shape, dtype=dtype)
    out[pos] = INF
    out[neg] = NEG_INF
    out[finite] = a[finite] + b[finite]
    return out


# ---------------------------------------------------------------------------
# Law catalogue
# ---------------------------------------------------------------------------


class Enlargement(NamedTuple):
    """Bundle of one enlargement's operations, for the generic law checks."""

    name: str
    upper: Callable
    lower: Callable
    inverse: Callable
    unit: object
    bottom: object
    top: object
    probes: tuple


MULTIPLICATIVE = Enlargement(
    name="multiplicative",
    upper=upper_mul,
    lower=lower_mul,
    inverse=ext_inverse,
    unit=1,
    bottom=0,
    top=INF,
    probes=(0, Fraction(1, 2), 1, 2, INF),
)

ADDITIVE = Enlargement(
    name="additive",
    upper=upper_add,
    lower=lower_add,
    inverse=ext_neg,
    unit=0,
    bottom=NEG_INF,
    top=INF,
    probes=(NEG_INF, -1, 0, 1, INF),
)


class LawResult(NamedTuple):
    law: str
    cases: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


def _families(probes, max_size=3):
    for size in range(0, max_size + 1):
        yield from product(probes, repeat=size)


def _law_checks(E: Enlargement):
    up, lo, inv = E.upper, E.lower, E.inverse
    sup = lambda xs: ext_sup(xs, E.bottom)  # noqa: E731
    inf = lambda xs: ext_inf(xs, E.top)  # noqa: E731
    return {
        "finite agreement": (1, lambda a: up(a, E.unit) == a == lo(a, E.unit)),
        "involutive inverse": (1, lambda a: inv(inv(a)) == a),
        "order bounds": (1, lambda a: E.bottom <= a <= E.top),
        "upper commutative": (2, lambda a, b: up(a, b) == up(b, a)),
        "lower commutative": (2, lambda a, b: lo(a, b) == lo(b, a)),
        "upper associative": (3, lambda a, b, c: up(up(a, b), c) == up(a, up(b, c))),
        "lower associative": (3, lambda a, b, c: lo(lo(a, b), c) == lo(a, lo(b, c))),
        "isotony": (3, lambda a, b, c: not b <= c
                    or (up(a, b) <= up(a, c) and lo(a, b) <= lo(a, c))),
        "lower below upper": (2, lambda a, b: lo(a, b) <= up(a, b)),
        "inverse swaps compositions": (
            2, lambda a, b: inv(up(a, b)) == lo(inv(a), inv(b))
            and inv(lo(a, b)) == up(inv(a), inv(b))),
        "inverse inequalities": (
            2, lambda a, b: up(inv(a), inv(b)) >= inv(up(a, b))
            and lo(inv(a), inv(b)) <= inv(lo(a, b))),
        "self composition with inverse": (
            1, lambda a: up(a, inv(a)) >= E.unit and lo(a, inv(a)) <= E.unit),
        "order via residual": (
            2, lambda a, b: (lo(a, inv(b)) <= E.unit) == (a <= b)
            == (E.unit <= up(b, inv(a)))),
        "galois (residuation)": (
            3, lambda a, b, c: (lo(a, inv(b)) <= c) == (a <= up(b, c))
            == (lo(a, inv(c)) <= b)),
        "galois (dual residuation)": (
            3, lambda a, b, c: (c <= up(b, inv(a))) == (lo(a, c) <= b)
            == (a <= up(b, inv(c)))),
        "mixed associativity": (
            3, lambda a, b, c: lo(up(a, b), c) <= up(a, lo(b, c))),
        "inverse of inf/sup": (
            "family", lambda xs: inv(inf(xs)) == sup([inv(x) for x in xs])
            and inv(sup(xs)) == inf([inv(x) for x in xs])),
        "inf distributes over upper": (
            "scaled family", lambda a, xs: inf([up(a, x) for x in xs]) == up(a, inf(xs))),
        "sup distributes over lower": (
            "scaled family", lambda a, xs: sup([lo(a, x) for x in xs]) == lo(a, sup(xs))),
        "double inf/sup of upper": (
            "two families", lambda xs, ys:
            inf([up(x, y) for x in xs for y in ys]) == up(inf(xs), inf(ys))
            and sup([up(x, y) for x in xs for y in ys]) <= up(sup(xs), sup(ys))),
        "double inf/sup of lower": (
            "two families", lambda xs, ys:
            sup([lo(x, y) for x in xs for y in ys]) == lo(sup(xs), sup(ys))
            and inf([lo(x, y) for x in xs for y in ys]) >= lo(inf(xs), inf(ys))),
        "lower continuity below top": (
            "scaled nonempty family", lambda b, xs: b == E.top
            or inf([lo(x, b) for x in xs]) == lo(inf(xs), b)),
        "upper continuity above bottom": (
            "scaled nonempty family", lambda b, xs: b == E.bottom
            or sup([up(x, b) for x in xs]) == up(sup(xs), b)),
    }


def check_laws(E: Enlargement, probes: Iterable | None = None,
               family_size: int = 3) -> list[LawResult]:
    """Exhaustively check every enlargement law over a probe set.

    Families for the inf/sup laws range over all tuples of length
    ``0..family_size`` drawn from the probes, so the empty family is covered.
    """
    probes = tuple(E.probes if probes is None else probes)
    results = []
    for law, (arity, predicate) in _law_checks(E).items():
        cases = 0
        failures = []
        if arity == "family":
            inputs = ((xs,) for xs in _families(probes, family_size))
        elif arity == "scaled family":
            inputs = ((a, xs) for a in probes for xs in _families(probes, family_size))
        elif arity == "scaled nonempty family":
            inputs = ((a, xs) for a in probes for xs in _families(probes, family_size) if xs)
        elif arity == "two families":
            fams = list(_families(probes, 2))
            inputs = ((xs, ys) for xs in fams for ys in fams)
        else:
            inputs = product(probes, repeat=arity)
        for args in inputs:
            cases += 1
            if not predicate(*args):
                failures.append(args)
        results.append(LawResult(law, cases, failures))
    return results
