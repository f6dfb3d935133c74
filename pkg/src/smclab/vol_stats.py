"""Realized-volatility statistics for leveraged fund returns.

Two statistics are computed over a p-day window:

* SMC, the shortfall from maximum convexity: the censored geometric
  excess return of the reachable envelope r_max over the observed fund
  return, max{0, (1 + R_MAX) / (1 + R_LETF) - 1}. It is a rate of
  return, bounded below at 0, and +inf if the fund returned -100%.
* SN2, the 2-norm of the centered log returns,
  sqrt(sum_j (log(1 + R_j) - log(1 + rbar_g))^2), where rbar_g is the
  geometric mean return, so the center is the mean of the logs.

Also here: the tracking-error decomposition of fund returns, summary
statistics of sampling distributions (population moments), and the
normality/dependence diagnostics (normal QQ, ACF, PACF).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, DomainError, InvalidInputError
from .returns_core import (
    ReturnSeries,
    _as_return_array,
    _require_above_floor,
    compound_return,
    log_returns,
)
from .convexity import r_max

__all__ = [
    "TRADING_DAYS_PER_YEAR",
    "SmcInput",
    "smc_from_totals",
    "smc",
    "sn2",
    "sn2_raw",
    "AsymmetryReport",
    "sn2_sign_asymmetry_report",
    "tracking_errors",
    "daily_fee",
    "SummaryStats",
    "summary_stats",
    "Diagnostics",
    "diagnostics",
]

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True)
class SmcInput:
    """Aligned fund and index return windows plus the stated multiple."""

    letf_returns: np.ndarray
    index_returns: np.ndarray
    beta: float

    def __post_init__(self) -> None:
        letf = _as_return_array(self.letf_returns, "SmcInput.letf_returns")
        index = _as_return_array(self.index_returns, "SmcInput.index_returns")
        if letf.size != index.size:
            raise InvalidInputError(
                f"SmcInput: length mismatch {letf.size} vs {index.size}"
            )
        _require_above_floor(letf, "SmcInput.letf_returns")
        _require_above_floor(index, "SmcInput.index_returns")
        object.__setattr__(self, "letf_returns", letf)
        object.__setattr__(self, "index_returns", index)


def smc_from_totals(r_max_total: float, r_letf_total: float) -> float:
    """SMC from period totals: max{0, (1 + r_max_total) / (1 + r_letf_total) - 1}.

    r_letf_total == -1 (fund wiped out) maps to +inf, which sorts above
    every finite value; if the envelope is also -1 there was no
    shortfall and the result is 0.
    """
    if r_letf_total < -1.0:
        raise DomainError(f"smc_from_totals: r_letf_total {r_letf_total} < -1")
    if r_max_total < -1.0:
        raise DomainError(f"smc_from_totals: r_max_total {r_max_total} < -1")
    if r_letf_total == -1.0:
        return 0.0 if r_max_total == -1.0 else math.inf
    excess = (1.0 + r_max_total) / (1.0 + r_letf_total) - 1.0
    return excess if excess > 0.0 else 0.0


def smc(inp: SmcInput, censor: bool = True) -> float:
    """SMC of a window: envelope from the index series, shortfall of the fund.

    With censor=False the raw geometric excess is returned (possibly
    negative), which equals exp(sum_j log((1 + beta*rbar) / (1 + R_LETF,j))) - 1
    when all factors are positive.
    """
    p = inp.index_returns.size
    envelope = r_max(compound_return(inp.index_returns), p, inp.beta)
    r_letf_total = compound_return(inp.letf_returns)
    if censor:
        return smc_from_totals(envelope, r_letf_total)
    return (1.0 + envelope) / (1.0 + r_letf_total) - 1.0


def sn2(returns: Sequence[float] | np.ndarray) -> float:
    """2-norm of centered log returns; exactly 0 for a constant series."""
    x = log_returns(returns)
    if x.max() == x.min():
        return 0.0
    c = x - x.mean()
    return math.sqrt(math.fsum(c * c))


def sn2_raw(returns: Sequence[float] | np.ndarray) -> float:
    """2-norm of centered raw (non-log) returns.

    Test-harness variant only: on raw returns the statistic is exactly
    invariant under beta -> -beta, which the log form breaks.
    """
    arr = _as_return_array(returns, "sn2_raw")
    c = arr - arr.mean()
    return math.sqrt(math.fsum(c * c))


@dataclass(frozen=True)
class AsymmetryReport:
    """Observed rates for the claimed SN2 long/short ordering.

    The claim under test: with synthetic +/-beta funds on the same
    index window, SN2(+beta) <= SN2(-beta) when the geometric mean
    return is >= 0, and the reverse when it is <= 0. Both claims meet
    at a zero geometric mean, where direct computation gives strict
    inequality, so this is reported, never asserted.
    """

    n_pos: int
    violations_pos: int
    n_neg: int
    violations_neg: int
    n_zero: int

    @property
    def rate_pos(self) -> float:
        return self.violations_pos / self.n_pos if self.n_pos else math.nan

    @property
    def rate_neg(self) -> float:
        return self.violations_neg / self.n_neg if self.n_neg else math.nan


def sn2_sign_asymmetry_report(
    index_windows: Iterable[Sequence[float]], beta: float
) -> AsymmetryReport:
    """Check the SN2 ordering claim over index windows with strict-sign means.

    Windows where any |beta * R_j| >= 1 are ignored (the synthetic fund
    returns would not be admissible).
    """
    n_pos = v_pos = n_neg = v_neg = n_zero = 0
    for window in index_windows:
        arr = _as_return_array(window, "sn2_sign_asymmetry_report")
        if np.max(np.abs(beta * arr)) >= 1.0:
            continue
        gm = compound_return(arr)
        long_side = sn2(beta * arr)
        short_side = sn2(-beta * arr)
        if gm > 0.0:
            n_pos += 1
            v_pos += long_side > short_side
        elif gm < 0.0:
            n_neg += 1
            v_neg += long_side < short_side
        else:
            n_zero += 1
    return AsymmetryReport(n_pos, v_pos, n_neg, v_neg, n_zero)


def daily_fee(annual_fee: float) -> float:
    """Daily management fee drag: annual_fee / 252."""
    return annual_fee / TRADING_DAYS_PER_YEAR


def tracking_errors(
    letf: ReturnSeries, index: ReturnSeries, beta: float, annual_fee: float
) -> np.ndarray:
    """Daily residuals eps_t = R_LETF,t - beta * R_Index,t + annual_fee/252.

    The two series must share their date vector exactly.
    """
    if letf.dates != index.dates:
        raise AlignmentError(
            f"tracking_errors: {letf.ticker} and {index.ticker} have different dates"
        )
    return letf.returns - beta * index.returns + daily_fee(annual_fee)


@dataclass(frozen=True)
class SummaryStats:
    count: int
    mean: float
    median: float
    range: float
    variance: float
    skewness: float
    kurtosis: float


def summary_stats(values: Sequence[float] | np.ndarray, ddof: int = 0) -> SummaryStats:
    """Population-moment summary of a sample.

    variance = m2, skewness = m3 / m2^1.5, kurtosis = m4 / m2^2, with
    m_k the central moments using the biased 1/n convention. Pass
    ddof=1 for the sample-variance variant (variance only; the shape
    moments stay population). Degenerate samples (all equal) report
    NaN skewness and kurtosis.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("summary_stats: expected a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("summary_stats: values must be finite")
    n = arr.size
    mean = float(arr.mean())
    d = arr - mean
    # an exactly constant sample is degenerate even when mean round-off
    # leaves a nonzero residue in d
    degenerate = float(arr.max()) == float(arr.min())
    m2 = 0.0 if degenerate else float(np.mean(d * d))
    variance = m2 if ddof == 0 else float(np.sum(d * d) / max(n - ddof, 1))
    if degenerate:
        variance = 0.0
    den_skew = m2**1.5
    den_kurt = m2 * m2
    if den_skew == 0.0 or den_kurt == 0.0:  # degenerate or sub-normal spread
        skew = kurt = math.nan
    else:
        skew = float(np.mean(d**3)) / den_skew
        kurt = float(np.mean(d**4)) / den_kurt
    return SummaryStats(
        count=n,
        mean=mean,
        median=float(np.median(arr)),
        range=float(arr.max() - arr.min()),
        variance=variance,
        skewness=skew,
        kurtosis=kurt,
    )


@dataclass(frozen=True)
class Diagnostics:
    """Normal QQ pairs plus ACF/PACF by lag, with the 95% white-noise band."""

    qq_points: np.ndarray = field(repr=False)
    acf: np.ndarray
    pacf: np.ndarray
    band: float


def _durbin_levinson(rho: np.ndarray) -> np.ndarray:
    # rho[k] for k = 1..m; returns phi_kk for the same lags.
    m = rho.size
    pacf = np.empty(m)
    phi_prev = np.zeros(m + 1)
    for k in range(1, m + 1):
        if k == 1:
            phi_kk = rho[0]
        else:
            num = rho[k - 1] - np.dot(phi_prev[1:k], rho[k - 2 :: -1][: k - 1])
            den = 1.0 - np.dot(phi_prev[1:k], rho[: k - 1])
            phi_kk = num / den if den != 0.0 else math.nan
        phi = phi_prev.copy()
        phi[k] = phi_kk
        phi[1:k] = phi_prev[1:k] - phi_kk * phi_prev[k - 1 : 0 : -1]
        phi_prev = phi
        pacf[k - 1] = phi_kk
    return pacf


def diagnostics(
    returns: Sequence[float] | np.ndarray, max_lag: int, squared: bool = False
) -> Diagnostics:
    """QQ/ACF/PACF of the (optionally squared) log returns.

    ACF uses the biased positive-definite estimator; PACF comes from
    the Durbin-Levinson recursion; QQ theoretical quantiles use the
    Blom plotting position (i - 3/8) / (n + 1/4) against the sample
    standardized by its population moments. band = 1.96 / sqrt(n).
    A constant series yields NaN beyond lag 0.
    """
    if max_lag < 1:
        raise InvalidInputError(f"diagnostics: max_lag must be >= 1, got {max_lag}")
    x = log_returns(returns)
    n = x.size
    if n <= max_lag:
        raise InvalidInputError(f"diagnostics: series length {n} <= max_lag {max_lag}")
    if squared:
        x = x * x

    c = x - x.mean()
    c0 = float(np.dot(c, c)) / n
    acf = np.empty(max_lag + 1)
    acf[0] = 1.0
    # a constant series must take the degenerate branch exactly; mean
    # round-off would otherwise leave a tiny constant residue whose ACF
    # is the spurious ramp (n-k)/n
    if c0 == 0.0 or x.max() == x.min():
        acf[1:] = math.nan
        pacf = np.full(max_lag + 1, math.nan)
        pacf[0] = 1.0
        qq = np.full((n, 2), math.nan)
    else:
        for k in range(1, max_lag + 1):
            acf[k] = float(np.dot(c[:-k], c[k:])) / (n * c0)
        pacf = np.empty(max_lag + 1)
        pacf[0] = 1.0
        pacf[1:] = _durbin_levinson(acf[1:])
        std = math.sqrt(c0)
        sample_q = np.sort(x)
        inv = NormalDist().inv_cdf
        theo_q = np.array([inv((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
        qq = np.column_stack([theo_q, (sample_q - x.mean()) / std])
    return Diagnostics(qq_points=qq, acf=acf, pacf=pacf, band=1.96 / math.sqrt(n))
