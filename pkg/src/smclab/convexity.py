"""Convexity gap of leveraged daily compounding, and its extremes.

The central quantity is the gap

    D(R | beta) = [prod(1 + beta*R_j) - 1] - [beta * (prod(1 + R_j) - 1)]

between the return of a daily-rebalanced leveraged product and the
return of a once-leveraged buy-and-hold position over the same days.
D < 0 is volatility drag, D > 0 is convexity. Expanding the products
shows D is a weighted sum of the elementary symmetric polynomials of
the returns with weights (beta^g - beta), g = 2..p, which this module
also evaluates directly as an independent cross-check.

Holding the period return fixed, D is maximized when every day equals
the geometric mean return, which gives the reachable upper envelope

    r_max(x, p, beta) = (1 + beta * ((1+x)^(1/p) - 1))^p - 1

and, letting p grow, the limit curve (1+x)^beta - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvalidInputError
from .returns_core import _as_return_array, _require_above_floor, leveraged_daily_compound

__all__ = [
    "DRAG",
    "CONVEXITY",
    "NEUTRAL",
    "CLASS_TOL",
    "EXPANSION_MAX_DAYS",
    "classify",
    "convexity_gap",
    "convexity_gap_expansion",
    "r_max",
    "limit_daily_curve",
    "periodic_leverage",
    "CurveRow",
    "emit_curve_family",
]

DRAG = "Drag"
CONVEXITY = "Convexity"
NEUTRAL = "Neutral"

# An exact zero gap occurs only analytically, so the neutral band is a
# pure floating-point guard.
CLASS_TOL = 1e-12

# The expansion oracle is O(p^2) but exists to cross-check small windows.
EXPANSION_MAX_DAYS = 20


def classify(gap: float, tol: float = CLASS_TOL) -> str:
    """Label a gap value as Drag (< -tol), Convexity (> +tol), or Neutral."""
    if gap < -tol:
        return DRAG
    if gap > tol:
        return CONVEXITY
    return NEUTRAL


def convexity_gap(returns: Sequence[float] | np.ndarray, beta: float) -> float:
    """D(R | beta): leveraged daily compound minus censored leveraged period return.

    The daily-compounded term censors each factor at 0 (floor -1); the
    period term beta * (prod(1+R_j) - 1) is censored at -1 as a whole.
    """
    arr = _as_return_array(returns, "convexity_gap")
    _require_above_floor(arr, "convexity_gap")
    daily = leveraged_daily_compound(arr, beta)
    periodic = max(-1.0, beta * math.expm1(math.fsum(np.log1p(arr))))
    return daily - periodic


def _elementary_symmetric(values: np.ndarray) -> np.ndarray:
    # Coefficients of prod(1 + v_j * t); index g holds e_g.
    coeffs = np.zeros(values.size + 1)
    coeffs[0] = 1.0
    for k, v in enumerate(values):
        coeffs[1 : k + 2] += v * coeffs[: k + 1].copy()
    return coeffs


def convexity_gap_expansion(returns: Sequence[float] | np.ndarray, beta: float) -> float:
    """Polynomial-expansion oracle for `convexity_gap` (no censoring).

    sum over g = 2..p of (beta^g - beta) * e_g(R), where e_g is the g-th
    elementary symmetric polynomial of the returns. Equals convexity_gap
    whenever no censoring triggers. Capped at p <= EXPANSION_MAX_DAYS.
    """
    arr = _as_return_array(returns, "convexity_gap_expansion")
    if arr.size > EXPANSION_MAX_DAYS:
        raise CapacityError(
            f"convexity_gap_expansion: p={arr.size} exceeds cap {EXPANSION_MAX_DAYS}"
        )
    e = _elementary_symmetric(arr)
    terms = [(beta**g - beta) * e[g] for g in range(2, arr.size + 1)]
    return math.fsum(terms)


def r_max(index_total: float, p: int, beta: float) -> float:
    """Largest leveraged daily-compounded return consistent with a period return.

    Attained when all p days equal the geometric mean return, so
    r_max = (1 + beta * rbar)^p - 1 with rbar = (1 + index_total)^(1/p) - 1.
    Censored to -1 when 1 + beta * rbar <= 0. beta = 1 returns
    index_total exactly (the envelope collapses onto the compound return).
    """
    if p < 1:
        raise InvalidInputError(f"r_max: p must be >= 1, got {p}")
    if index_total <= -1.0:
        raise DomainError(f"r_max: index_total {index_total} <= -1")
    if beta == 1.0:
        return float(index_total)
    rbar = math.expm1(math.log1p(index_total) / p)
    base = 1.0 + beta * rbar
    if base <= 0.0:
        return -1.0
    return math.expm1(p * math.log(base))


def limit_daily_curve(index_total: float, beta: float) -> float:
    """p -> infinity limit of r_max: (1 + index_total)^beta - 1, floored at -1."""
    if index_total <= -1.0:
        raise DomainError(f"limit_daily_curve: index_total {index_total} <= -1")
    return max(-1.0, math.expm1(beta * math.log1p(index_total)))


def periodic_leverage(index_total: float, beta: float) -> float:
    """Once-leveraged period return beta * index_total, censored at -1."""
    if index_total <= -1.0:
        raise DomainError(f"periodic_leverage: index_total {index_total} <= -1")
    return max(-1.0, beta * index_total)


@dataclass(frozen=True)
class CurveRow:
    """One point of the daily vs. periodic leverage curve family.

    `p` is a number of days, or math.inf for the limit curve (encoded
    as -1 in CSV output).
    """

    beta: float
    p: float
    x: float
    y_daily: float
    y_periodic: float


def emit_curve_family(
    beta_list: Iterable[float],
    p_list: Iterable[float],
    x_grid: Sequence[float] | np.ndarray,
) -> list[CurveRow]:
    """Evaluate the curve family on a grid, rows ordered by (beta, p, x).

    For finite p, y_daily = r_max(x, p, beta); p = math.inf selects the
    limit curve. y_periodic = beta * x censored at -1.
    """
    xs = _as_return_array(x_grid, "emit_curve_family")
    _require_above_floor(xs, "emit_curve_family")
    ps = list(p_list)
    for p in ps:
        if p != math.inf and (p < 1 or p != int(p)):
            raise InvalidInputError(f"emit_curve_family: bad window length {p}")
    rows = []
    for beta in sorted(set(float(b) for b in beta_list)):
        for p in sorted(set(float(p) for p in ps)):
            for x in np.sort(xs):
                x = float(x)
                if p == math.inf:
                    y_daily = limit_daily_curve(x, beta)
                else:
                    y_daily = r_max(x, int(p), beta)
                rows.append(CurveRow(beta, p, x, y_daily, periodic_leverage(x, beta)))
    return rows
