"""Rolling-window evaluation of the volatility statistics.

Windows are contiguous p-day spans stepped by a fixed stride (default
1, i.e. overlapping daily windows: n days yield n - p + 1 of them).
Per window the engine records the index and fund compound returns, the
reachable envelope r_max, SMC, SN2 of the fund log returns, and the
drag/convexity class of the index window at the fund's multiple.

Window sums are formed from cumulative sums of log returns, so a full
multi-year series evaluates in one vectorized pass per statistic.
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .convexity import CLASS_TOL, CONVEXITY, DRAG, NEUTRAL
from .data_io import AlignedPair
from .errors import InvalidInputError
from .returns_core import ReturnSeries
from .vol_stats import SummaryStats, summary_stats

__all__ = [
    "Window",
    "roll",
    "WindowRecord",
    "evaluate_windows",
    "TickerSummary",
    "summarize_by_ticker",
    "RankingRow",
    "rank_by_mean",
    "CounterexampleInstance",
    "CounterexampleReport",
    "counterexample_search",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Window:
    start: int
    stop: int  # exclusive
    end_date: dt.date


def roll(pair: AlignedPair, p: int, step: int = 1) -> list[Window]:
    """Enumerate windows over an aligned pair, ordered by end date.

    Returns floor((n - p) / step) + 1 windows; an empty list (with a
    logged warning) when the pair is shorter than p.
    """
    if p < 1 or step < 1:
        raise InvalidInputError(f"roll: need p >= 1 and step >= 1, got p={p} step={step}")
    n = len(pair)
    if n < p:
        log.warning("roll: %s has %d days, shorter than window p=%d", pair.spec.ticker, n, p)
        return []
    dates = pair.letf.dates
    return [
        Window(start, start + p, dates[start + p - 1])
        for start in range(0, n - p + 1, step)
    ]


@dataclass(frozen=True)
class WindowRecord:
    """Results for one p-day window of one fund/index pair."""

    ticker: str
    index_ticker: str
    end_date: dt.date
    p: int
    beta: float
    r_index: float
    r_letf: float
    r_max: float
    smc: float
    sn2: float
    convexity_class: str


def _window_sums(x: np.ndarray, p: int, starts: np.ndarray) -> np.ndarray:
    cs = np.concatenate(([0.0], np.cumsum(x)))
    return cs[starts + p] - cs[starts]


def _r_max_vec(r_index: np.ndarray, p: int, beta: float, log_idx_sums: np.ndarray) -> np.ndarray:
    # beta = 1 collapses the envelope onto the compound return exactly.
    if beta == 1.0:
        return r_index.copy()
    rbar = np.expm1(log_idx_sums / p)
    base = 1.0 + beta * rbar
    out = np.full_like(base, -1.0)
    ok = base > 0.0
    out[ok] = np.expm1(p * np.log(base[ok]))
    return out


def _smc_vec(r_max: np.ndarray, r_letf: np.ndarray) -> np.ndarray:
    # same arithmetic as vol_stats.smc_from_totals, elementwise
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = (1.0 + r_max) / (1.0 + r_letf) - 1.0
    smc = np.maximum(0.0, excess)
    wiped = r_letf == -1.0
    if wiped.any():
        smc[wiped] = np.where(r_max[wiped] == -1.0, 0.0, np.inf)
    return smc


def evaluate_windows(
    pair: AlignedPair, p: int, beta: float | None = None, step: int = 1
) -> list[WindowRecord]:
    """Evaluate every rolling window of an aligned pair.

    `beta` defaults to the pair's catalog multiple. SMC is recomputed
    from (r_max, r_letf) totals, so smc_from_totals applied to a record
    reproduces its smc field exactly.
    """
    if beta is None:
        beta = pair.spec.beta
    windows = roll(pair, p, step)
    if not windows:
        return []
    starts = np.array([w.start for w in windows])

    log_idx = np.log1p(pair.index.returns)
    log_letf = np.log1p(pair.letf.returns)
    s_idx = _window_sums(log_idx, p, starts)
    s_letf = _window_sums(log_letf, p, starts)
    r_index = np.expm1(s_idx)
    r_letf = np.expm1(s_letf)
    r_max = _r_max_vec(r_index, p, beta, s_idx)
    smc = _smc_vec(r_max, r_letf)

    # SN2 on the fund's log returns: sqrt(sum x^2 - (sum x)^2 / p).
    # Constant windows are forced to exactly 0; the cumulative-sum form
    # leaves ~1e-9 cancellation residue there.
    s_letf_sq = _window_sums(log_letf * log_letf, p, starts)
    sn2 = np.sqrt(np.maximum(0.0, s_letf_sq - s_letf * s_letf / p))
    if p >= 2:
        changed = (np.diff(pair.letf.returns) != 0.0).astype(float)
        sn2[_window_sums(changed, p - 1, starts) == 0.0] = 0.0

    # drag/convexity class of the index window at the fund's multiple
    levered = beta * pair.index.returns
    bad = 1.0 + levered <= 0.0
    log_lev = np.where(bad, 0.0, np.log1p(np.where(bad, 0.0, levered)))
    daily = np.expm1(_window_sums(log_lev, p, starts))
    daily[_window_sums(bad.astype(float), p, starts) > 0.0] = -1.0
    periodic = np.maximum(-1.0, beta * r_index)
    gap = daily - periodic
    labels = np.where(gap < -CLASS_TOL, DRAG, np.where(gap > CLASS_TOL, CONVEXITY, NEUTRAL))

    return [
        WindowRecord(
            ticker=pair.spec.ticker,
            index_ticker=pair.spec.index_ticker,
            end_date=w.end_date,
            p=p,
            beta=float(beta),
            r_index=float(r_index[i]),
            r_letf=float(r_letf[i]),
            r_max=float(r_max[i]),
            smc=float(smc[i]),
            sn2=float(sn2[i]),
            convexity_class=str(labels[i]),
        )
        for i, w in enumerate(windows)
    ]


@dataclass(frozen=True)
class TickerSummary:
    """Sampling-distribution summaries of SMC and SN2 for one ticker.

    The `larger_*` fields name which statistic ('smc' or 'sn2') has the
    greater value for each shape measure; skewness compares absolute
    values so left- and right-skewed distributions rank comparably.
    """

    ticker: str
    index_ticker: str
    p: int
    beta: float
    obs: int
    smc_stats: SummaryStats
    sn2_stats: SummaryStats
    larger_range: str
    larger_variance: str
    larger_skewness: str
    larger_kurtosis: str


def _larger(a: float, b: float) -> str:
    # a is the smc value, b the sn2 value
    if math.isnan(a) or math.isnan(b):
        return "tie"
    if a > b:
        return "smc"
    if b > a:
        return "sn2"
    return "tie"


def summarize_by_ticker(
    records: Iterable[WindowRecord], min_records: int = 3
) -> list[TickerSummary]:
    """Summaries per (ticker, p); groups with too few windows are omitted.

    Windows with a non-finite SMC (a wiped-out fund) are excluded from
    the SMC sample with a warning; they would make every moment
    degenerate.
    """
    groups: dict[tuple[str, int], list[WindowRecord]] = {}
    for rec in records:
        groups.setdefault((rec.ticker, rec.p), []).append(rec)
    out = []
    for (ticker, p), recs in sorted(groups.items()):
        smc_values = np.array([r.smc for r in recs])
        if not np.all(np.isfinite(smc_values)):
            n_bad = int(np.sum(~np.isfinite(smc_values)))
            log.warning("summarize: %s p=%d: dropping %d non-finite SMC values", ticker, p, n_bad)
            smc_values = smc_values[np.isfinite(smc_values)]
        if len(recs) < min_records or smc_values.size < min_records:
            log.warning("summarize: %s p=%d: fewer than %d windows, omitted", ticker, p, min_records)
            continue
        smc_stats = summary_stats(smc_values)
        sn2_stats = summary_stats(np.array([r.sn2 for r in recs]))
        out.append(
            TickerSummary(
                ticker=ticker,
                index_ticker=recs[0].index_ticker,
                p=p,
                beta=recs[0].beta,
                obs=len(recs),
                smc_stats=smc_stats,
                sn2_stats=sn2_stats,
                larger_range=_larger(smc_stats.range, sn2_stats.range),
                larger_variance=_larger(smc_stats.variance, sn2_stats.variance),
                larger_skewness=_larger(abs(smc_stats.skewness), abs(sn2_stats.skewness)),
                larger_kurtosis=_larger(smc_stats.kurtosis, sn2_stats.kurtosis),
            )
        )
    return out


@dataclass(frozen=True)
class RankingRow:
    """One rank position of the per-side mean-statistic leaderboards.

    rank 1 carries the greatest sample mean. Ties are broken
    lexicographically by ticker and flagged; `disagreement` marks rank
    positions where the two statistics name different tickers.
    """

    rank: int
    ticker_by_sn2: str
    mean_sn2: float
    ticker_by_smc: str
    mean_smc: float
    disagreement: bool
    tie_sn2: bool = False
    tie_smc: bool = False


def rank_by_mean(
    entries: Sequence[tuple[str, float, float]], side: str
) -> list[RankingRow]:
    """Rank tickers of one side by mean SN2 and mean SMC, descending.

    `entries` holds (ticker, mean_sn2, mean_smc) triples; at least two
    tickers are required for a ranking to mean anything.
    """
    if len(entries) < 2:
        raise InvalidInputError(f"rank_by_mean[{side}]: need >= 2 tickers, got {len(entries)}")
    by_sn2 = sorted(entries, key=lambda e: (-e[1], e[0]))
    by_smc = sorted(entries, key=lambda e: (-e[2], e[0]))
    sn2_means = [e[1] for e in by_sn2]
    smc_means = [e[2] for e in by_smc]
    rows = []
    for i in range(len(entries)):
        tie_sn2 = sn2_means.count(sn2_means[i]) > 1
        tie_smc = smc_means.count(smc_means[i]) > 1
        rows.append(
            RankingRow(
                rank=i + 1,
                ticker_by_sn2=by_sn2[i][0],
                mean_sn2=by_sn2[i][1],
                ticker_by_smc=by_smc[i][0],
                mean_smc=by_smc[i][2],
                disagreement=by_sn2[i][0] != by_smc[i][0],
                tie_sn2=tie_sn2,
                tie_smc=tie_smc,
            )
        )
    return rows


@dataclass(frozen=True)
class CounterexampleInstance:
    index_ticker: str
    end_date: dt.date
    beta: float
    long_smc: float
    short_smc: float


@dataclass(frozen=True)
class CounterexampleReport:
    """Windows where the long-side shortfall strictly beat the short side."""

    instances: list[CounterexampleInstance]
    scanned: int
    skipped: int

    @property
    def compared(self) -> int:
        return self.scanned - self.skipped

    @property
    def flagged(self) -> int:
        return len(self.instances)


def counterexample_search(
    index_series: Iterable[ReturnSeries],
    betas: Iterable[float],
    p: int,
    step: int = 1,
) -> CounterexampleReport:
    """Scan index windows with synthetic +/-beta funds (no fees, no errors).

    For each leverage magnitude |beta| >= 1 and each window, compare the
    long and short SMC; a window with any day |beta * R_j| >= 1 cannot
    host both synthetic funds and is skipped (counted, not censored).
    A constant window makes both shortfalls exactly 0 (each fund attains
    its envelope), so those are forced to 0 rather than left to round-off
    noise, which would otherwise decide the strict comparison.
    """
    if p < 1 or step < 1:
        raise InvalidInputError(f"counterexample_search: bad p={p} or step={step}")
    magnitudes = sorted({abs(float(b)) for b in betas})
    if any(m < 1.0 for m in magnitudes):
        raise InvalidInputError(f"counterexample_search: |beta| must be >= 1, got {magnitudes}")
    instances: list[CounterexampleInstance] = []
    scanned = 0
    skipped = 0
    for series in index_series:
        n = len(series)
        if n < p:
            continue
        starts = np.arange(0, n - p + 1, step)
        dates = series.dates
        log_idx = np.log1p(series.returns)
        s_idx = _window_sums(log_idx, p, starts)
        r_index = np.expm1(s_idx)
        if p >= 2:
            changed = (np.diff(series.returns) != 0.0).astype(float)
            constant = _window_sums(changed, p - 1, starts) == 0.0
        else:
            constant = np.ones(starts.size, dtype=bool)
        for m in magnitudes:
            scanned += starts.size
            bad = (np.abs(m * series.returns) >= 1.0).astype(float)
            ok = _window_sums(bad, p, starts) == 0.0
            n_ok = int(np.count_nonzero(ok))
            skipped += starts.size - n_ok
            if n_ok == 0:
                continue
            long_total = np.expm1(
                _window_sums(np.log1p(np.where(bad, 0.0, m * series.returns)), p, starts)
            )
            short_total = np.expm1(
                _window_sums(np.log1p(np.where(bad, 0.0, -m * series.returns)), p, starts)
            )
            long_smc = _smc_vec(_r_max_vec(r_index, p, m, s_idx), long_total)
            short_smc = _smc_vec(_r_max_vec(r_index, p, -m, s_idx), short_total)
            long_smc[constant] = 0.0
            short_smc[constant] = 0.0
            hits = np.nonzero(ok & (long_smc > short_smc))[0]
            instances.extend(
                CounterexampleInstance(
                    index_ticker=series.ticker,
                    end_date=dates[int(i) * step + p - 1],
                    beta=m,
                    long_smc=float(long_smc[i]),
                    short_smc=float(short_smc[i]),
                )
                for i in hits
            )
    return CounterexampleReport(instances=instances, scanned=scanned, skipped=skipped)
