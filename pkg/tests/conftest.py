import datetime as dt

import numpy as np
import pytest

from smclab import FundSpec, ReturnSeries, align


def make_series(ticker: str, returns, start=dt.date(2020, 1, 1)) -> ReturnSeries:
    returns = np.asarray(returns, dtype=float)
    dates = tuple(start + dt.timedelta(days=i) for i in range(len(returns)))
    return ReturnSeries(ticker, dates, returns)


def make_pair(letf_returns, index_returns, beta: float, fee: float = 0.0):
    side = "Long" if beta > 0 else "Short"
    spec = FundSpec("FUND", "Test", side, beta, fee, "IDX")
    return align(make_series("FUND", letf_returns), make_series("IDX", index_returns), spec)


@pytest.fixture
def series_factory():
    return make_series


@pytest.fixture
def pair_factory():
    return make_pair
