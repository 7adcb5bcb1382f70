"""Check records and the versioned JSON report they serialise to."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Check:
    """One identity evaluated on one instance.

    ``discrepancy`` is the worst violation found (``0`` when none, ``inf``
    when finite and infinite values disagree). ``exact`` marks checks done in
    rational arithmetic, reported as ``"exact"`` when they pass with zero
    discrepancy.
    """

    equation: str
    instance: str
    discrepancy: float | Fraction = 0
    tolerance: float | Fraction = 0
    exact: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance

    def to_json(self):
        if self.exact and self.discrepancy == 0:
            disc = "exact"
        else:
            disc = _num(self.discrepancy)
        out = {
            "equation": self.equation,
            "instance": self.instance,
            "max_discrepancy": disc,
            "tolerance": _num(self.tolerance),
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    return v


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, equation, instance, discrepancy=0, tolerance=0, exact=False, detail=""):
        c = Check(equation, instance, discrepancy, tolerance, exact, detail)
        self.checks.append(c)
        return c

    def add_bool(self, equation, instance, ok: bool, detail=""):
        """Record a yes/no clause: discrepancy 0 when it holds, 1 otherwise."""
        return self.add(equation, instance, 0 if ok else 1, 0, True, "" if ok else detail)

    def extend(self, other: "Report | Iterable[Check]"):
        self.checks.extend(other.checks if isinstance(other, Report) else other)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def failed_equations(self):
        return sorted({c.equation for c in self.failures})

    def sorted_checks(self):
        return sorted(self.checks, key=lambda c: (c.equation, c.instance))

    def to_json(self, **extra):
        out = {"schema": SCHEMA_VERSION}
        out.update(extra)
        out["pass"] = self.passed
        out["checks"] = [c.to_json() for c in self.sorted_checks()]
        return out

    def dumps(self, **extra) -> str:
        return json.dumps(self.to_json(**extra), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Discrepancy measures on extended reals
# ---------------------------------------------------------------------------


def _is_inf(v):
    return v == math.inf or v == -math.inf


def value_gap(a, b):
    """``|a - b|`` for extended reals, ``inf`` when exactly one side is infinite
    or the two infinities differ."""
    if _is_inf(a) or _is_inf(b):
        return 0 if a == b else math.inf
    return abs(a - b)


def excess(a, b):
    """How much ``a <= b`` is violated: ``max(a - b, 0)`` with extended values."""
    if a <= b:
        return 0
    if _is_inf(a) or _is_inf(b):
        return math.inf
    return a - b


def _float_arrays(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2:
        a, b = (np.asarray(p) for p in pairs)
        if a.dtype != object and b.dtype != object:
            return a.astype(float).ravel(), b.astype(float).ravel()
        return None
    return None


def max_gap(pairs) -> float | Fraction:
    """Worst :func:`value_gap` over ``zip``-ed pairs, or over a tuple
    ``(a, b)`` of float arrays (vectorised)."""
    arrs = _float_arrays(pairs)
    if arrs is not None:
        a, b = arrs
        if a.size == 0:
            return 0
        same = a == b
        inf_mismatch = ~same & (np.isinf(a) | np.isinf(b))
        if inf_mismatch.any():
            return math.inf
        with np.errstate(invalid="ignore"):
            d = np.where(same, 0.0, np.abs(a - b))
        return float(d.max())
    if isinstance(pairs, tuple) and len(pairs) == 2:
        pairs = zip(np.ravel(pairs[0]), np.ravel(pairs[1]))
    worst = 0
    for a, b in pairs:
        g = value_gap(a, b)
        if g > worst:
            worst = g
    return worst


def max_excess(pairs) -> float | Fraction:
    """Worst :func:`excess` of ``a <= b``; same input conventions as :func:`max_gap`."""
    arrs = _float_arrays(pairs)
    if arrs is not None:
        a, b = arrs
        if a.size == 0:
            return 0
        bad = a > b
        if not bad.any():
            return 0
        if (np.isinf(a[bad]) | np.isinf(b[bad])).any():
            return math.inf
        return float((a[bad] - b[bad]).max())
    if isinstance(pairs, tuple) and len(pairs) == 2:
        pairs = zip(np.ravel(pairs[0]), np.ravel(pairs[1]))
    worst = 0
    for a, b in pairs:
        g = excess(a, b)
        if g > worst:
            worst = g
    return worst
