"""Seeded synthetic return data for tests and desk-scale experiments.

Index generators draw log-return innovations (so simple returns stay
above -1 by construction) and map them through exp - 1. Fund series
follow the daily decomposition R_LETF = beta * R_Index - fee/252 + eps
with additive normal tracking error in simple-return space.

Randomness comes from numpy's PCG64 as wired by default_rng, one
generator per (model, purpose) keyed by the model's own 64-bit seed, so
runs are reproducible byte for byte.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .returns_core import ReturnSeries
from .vol_stats import daily_fee

__all__ = [
    "INDEX_KINDS",
    "IndexModel",
    "LetfModel",
    "gen_index",
    "synth_letf",
    "SIM_START_DATE",
]

INDEX_KINDS = ("iid_normal", "iid_student_t", "ar1", "constant")

# Synthetic dates are opaque ordered labels: consecutive calendar days
# from a fixed epoch.
SIM_START_DATE = dt.date(2000, 1, 3)


@dataclass(frozen=True)
class IndexModel:
    """Daily index return generator settings.

    kind "iid_normal": log returns ~ Normal(mean, vol^2).
    kind "iid_student_t": log returns mean + vol * t_df / sqrt(df/(df-2)),
        scaled so the standard deviation is vol; extra = df > 2.
    kind "ar1": stationary AR(1) on log returns with coefficient
        extra (|extra| < 1), marginal distribution Normal(mean, vol^2).
    kind "constant": every day returns `mean` as a simple return
        (degenerate generator for fixtures; vol and seed unused).
    """

    kind: str
    mean: float = 0.0
    vol: float = 0.0
    extra: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in INDEX_KINDS:
            raise InvalidInputError(f"IndexModel: unknown kind {self.kind!r}")
        if self.kind == "constant":
            if self.mean <= -1.0:
                raise DomainError(f"IndexModel: constant return {self.mean} <= -1")
            return
        if not self.vol > 0.0:
            raise InvalidInputError(f"IndexModel: vol must be > 0, got {self.vol}")
        if self.kind == "iid_student_t":
            if self.extra is None or self.extra <= 2.0:
                raise InvalidInputError(
                    f"IndexModel: student-t needs extra = df > 2, got {self.extra}"
                )
        if self.kind == "ar1":
            if self.extra is None or not abs(self.extra) < 1.0:
                raise InvalidInputError(
                    f"IndexModel: ar1 needs |extra| < 1, got {self.extra}"
                )


@dataclass(frozen=True)
class LetfModel:
    """Synthetic fund settings: multiple, annual fee, tracking-error scale."""

    beta: float
    annual_fee: float = 0.0
    error_sd: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.annual_fee < 0.0:
            raise InvalidInputError(f"LetfModel: annual_fee must be >= 0, got {self.annual_fee}")
        if self.error_sd < 0.0:
            raise InvalidInputError(f"LetfModel: error_sd must be >= 0, got {self.error_sd}")


def _sim_dates(n: int) -> tuple[dt.date, ...]:
    return tuple(SIM_START_DATE + dt.timedelta(days=i) for i in range(n))


def gen_index(model: IndexModel, n: int, ticker: str = "SIMIDX") -> ReturnSeries:
    """Generate n days of index returns per the model, reproducibly by seed."""
    if n < 1:
        raise InvalidInputError(f"gen_index: n must be >= 1, got {n}")
    if model.kind == "constant":
        returns = np.full(n, float(model.mean))
        return ReturnSeries(ticker, _sim_dates(n), returns)
    rng = np.random.default_rng(model.seed)
    if model.kind == "iid_normal":
        x = model.mean + model.vol * rng.standard_normal(n)
    elif model.kind == "iid_student_t":
        df = float(model.extra)
        x = model.mean + model.vol * math.sqrt((df - 2.0) / df) * rng.standard_t(df, n)
    else:  # ar1
        phi = float(model.extra)
        innov_sd = model.vol * math.sqrt(1.0 - phi * phi)
        z = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = model.mean + model.vol * z[0]
        for t in range(1, n):
            x[t] = model.mean + phi * (x[t - 1] - model.mean) + innov_sd * z[t]
    return ReturnSeries(ticker, _sim_dates(n), np.expm1(x))


def synth_letf(index: ReturnSeries, model: LetfModel, ticker: str = "SIMLETF") -> ReturnSeries:
    """Synthesize a fund series from an index series.

    Daily: beta * R - annual_fee/252 + eps, eps ~ Normal(0, error_sd),
    floored at -1. A floored day means the synthetic fund was wiped
    out, which a ReturnSeries cannot carry; that raises DomainError
    (pick a smaller |beta| or tamer index).
    """
    eps = (
        np.random.default_rng(model.seed).normal(0.0, model.error_sd, len(index))
        if model.error_sd > 0.0
        else np.zeros(len(index))
    )
    raw = model.beta * index.returns - daily_fee(model.annual_fee) + eps
    floored = np.maximum(-1.0, raw)
    if np.any(floored <= -1.0):
        day = index.dates[int(np.argmax(floored <= -1.0))]
        raise DomainError(
            f"synth_letf: fund wiped out on {day} (daily return <= -100%)"
        )
    return ReturnSeries(ticker, index.dates, floored)
