"""Exact arithmetic of daily simple returns.

Conventions used everywhere in this package:

* returns are simple decimal returns (0.01 means +1%),
* a realized return on a purchased asset is always > -1,
* compounding of p days: R = prod(1 + R_j) - 1,
* log returns are computed on demand, never stored.

Products over long windows are evaluated as exp(sum(log1p(R_j))) - 1
whenever every factor is strictly positive; 252-term direct products
lose precision. The log sums use math.fsum, so results are exactly
permutation invariant.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidInputError

__all__ = [
    "ReturnSeries",
    "compound_return",
    "geometric_mean_return",
    "log_returns",
    "leveraged_daily_compound",
]


def _as_return_array(returns: Sequence[float] | np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(returns, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError(f"{what}: expected a non-empty 1-d sequence of returns")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what}: returns must be finite")
    return arr


def _require_above_floor(arr: np.ndarray, what: str) -> None:
    if np.any(arr <= -1.0):
        bad = float(arr[arr <= -1.0][0])
        raise DomainError(f"{what}: return {bad} <= -1 (below the -100% floor)")


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """A dated series of daily simple total returns for one ticker.

    Invariants enforced at construction: dates strictly increasing, one
    return per date, every return finite and strictly greater than -1.
    A -100% day in observed data is a data error, not a value to carry.
    """

    ticker: str
    dates: tuple[dt.date, ...]
    returns: np.ndarray = field(repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        return (
            self.ticker == other.ticker
            and self.dates == other.dates
            and np.array_equal(self.returns, other.returns)
        )

    def __post_init__(self) -> None:
        arr = _as_return_array(self.returns, f"ReturnSeries[{self.ticker}]")
        _require_above_floor(arr, f"ReturnSeries[{self.ticker}]")
        dates = tuple(self.dates)
        if len(dates) != arr.size:
            raise InvalidInputError(
                f"ReturnSeries[{self.ticker}]: {len(dates)} dates vs {arr.size} returns"
            )
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise InvalidInputError(
                f"ReturnSeries[{self.ticker}]: dates must be strictly increasing"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "returns", arr)

    def __len__(self) -> int:
        return len(self.dates)


def compound_return(returns: Sequence[float] | np.ndarray) -> float:
    """Compound a sequence of daily returns: prod(1 + R_j) - 1.

    Raises InvalidInputError on empty input and DomainError if any
    element is <= -1. The result is mathematically > -1, though a
    product below ~1e-16 underflows to exactly -1 in double precision.
    """
    arr = _as_return_array(returns, "compound_return")
    _require_above_floor(arr, "compound_return")
    return math.expm1(math.fsum(np.log1p(arr)))


def geometric_mean_return(total: float, p: int) -> float:
    """Daily return that compounds to `total` over p days: (1+total)^(1/p) - 1."""
    if p < 1:
        raise InvalidInputError(f"geometric_mean_return: p must be >= 1, got {p}")
    if total <= -1.0:
        raise DomainError(f"geometric_mean_return: total {total} <= -1")
    return math.expm1(math.log1p(total) / p)


def log_returns(returns: Sequence[float] | np.ndarray) -> np.ndarray:
    """Element-wise log(1 + R_j); DomainError if any element is <= -1."""
    arr = _as_return_array(returns, "log_returns")
    _require_above_floor(arr, "log_returns")
    return np.log1p(arr)


def leveraged_daily_compound(returns: Sequence[float] | np.ndarray, beta: float) -> float:
    """Compound daily returns at a fixed leverage multiple.

    Each day contributes a factor max(0, 1 + beta * R_j): a leveraged
    fund is a purchased asset, so a day that would wipe out the NAV is
    censored at zero and the compound return stays at exactly -1 from
    then on. Result is always >= -1.
    """
    arr = _as_return_array(returns, "leveraged_daily_compound")
    levered = beta * arr
    if np.any(1.0 + levered <= 0.0):
        return -1.0
    return math.expm1(math.fsum(np.log1p(levered)))
