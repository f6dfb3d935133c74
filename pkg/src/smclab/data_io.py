"""CSV ingestion, date alignment, fund catalog, and all output writers.

Input data is long (tidy) CSV `date,ticker,return` with ISO-8601 dates
and decimal returns; tickers have different history lengths, which a
wide layout would not carry cleanly. All outputs are UTF-8, comma
separated, LF line endings, header row mandatory. Floats are written
with 12 significant digits, which round-trips doubles at the
magnitudes realized returns take.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass
from importlib.resources import files as _pkg_files
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, DataError, InvalidInputError
from .returns_core import ReturnSeries

__all__ = [
    "FundSpec",
    "AlignedPair",
    "load_returns",
    "write_returns",
    "load_catalog",
    "write_catalog",
    "default_catalog_path",
    "align",
    "fmt",
    "write_csv",
]

SIDES = ("Long", "Short")

RETURNS_HEADER = ["date", "ticker", "return"]
CATALOG_HEADER = [
    "ticker",
    "issuer",
    "side",
    "beta",
    "annual_fee",
    "index_ticker",
    "fund_name",
    "index_name",
]


@dataclass(frozen=True)
class FundSpec:
    """One catalog row: a fund, its multiple, fee, and underlying index."""

    ticker: str
    issuer: str
    side: str
    beta: float
    annual_fee: float
    index_ticker: str
    fund_name: str = ""
    index_name: str = ""

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise DataError(f"FundSpec[{self.ticker}]: unknown side {self.side!r}")
        if self.side == "Long" and not self.beta > 0:
            raise DataError(f"FundSpec[{self.ticker}]: Long side needs beta > 0, got {self.beta}")
        if self.side == "Short" and not self.beta < 0:
            raise DataError(f"FundSpec[{self.ticker}]: Short side needs beta < 0, got {self.beta}")
        if self.annual_fee < 0:
            raise DataError(f"FundSpec[{self.ticker}]: negative annual_fee {self.annual_fee}")


@dataclass(frozen=True)
class AlignedPair:
    """Fund and index series restricted to their common dates."""

    letf: ReturnSeries
    index: ReturnSeries
    spec: FundSpec
    dropped_letf: int = 0
    dropped_index: int = 0

    def __post_init__(self) -> None:
        if self.letf.dates != self.index.dates:
            raise AlignmentError(
                f"AlignedPair[{self.spec.ticker}]: date vectors differ after alignment"
            )

    def __len__(self) -> int:
        return len(self.letf)


def fmt(x: float) -> str:
    """Render a float for output files: 12 significant digits, inf/nan literal."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def json_safe(x: float) -> float | str:
    """Floats for JSON lines; non-finite values become strings."""
    return x if math.isfinite(x) else fmt(x)


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with a mandatory header, UTF-8 and LF endings."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _open_rows(path: Path | str, expected_header: list[str]) -> tuple[list[list[str]], int]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty file, expected header {','.join(expected_header)}")
    header = [h.strip().lower() for h in rows[0]]
    if header != expected_header:
        raise DataError(
            f"{path}: line 1: expected header {','.join(expected_header)}, got {','.join(rows[0])}"
        )
    return rows[1:], 2  # data rows and the line number of the first one


def load_returns(path: Path | str) -> dict[str, ReturnSeries]:
    """Load per-ticker return series from a long CSV, strictly validated.

    Duplicate (date, ticker) rows, unparseable fields, and returns
    <= -1 are rejected with the offending line number. Each series is
    sorted by date.
    """
    rows, first_line = _open_rows(path, RETURNS_HEADER)
    by_ticker: dict[str, dict[dt.date, float]] = {}
    for offset, row in enumerate(rows):
        line = first_line + offset
        if len(row) != 3:
            raise DataError(f"{path}: line {line}: expected 3 fields, got {len(row)}")
        raw_date, ticker, raw_ret = (field.strip() for field in row)
        if not ticker:
            raise DataError(f"{path}: line {line}: empty ticker")
        try:
            date = dt.date.fromisoformat(raw_date)
        except ValueError as exc:
            raise DataError(f"{path}: line {line}: bad date {raw_date!r}") from exc
        try:
            value = float(raw_ret)
        except ValueError as exc:
            raise DataError(f"{path}: line {line}: bad return {raw_ret!r}") from exc
        if not math.isfinite(value):
            raise DataError(f"{path}: line {line}: non-finite return {raw_ret!r}")
        if value <= -1.0:
            raise DataError(f"{path}: line {line}: return {value} <= -1")
        series = by_ticker.setdefault(ticker, {})
        if date in series:
            raise DataError(f"{path}: line {line}: duplicate ({raw_date}, {ticker})")
        series[date] = value
    out = {}
    for ticker in sorted(by_ticker):
        dates = tuple(sorted(by_ticker[ticker]))
        returns = np.array([by_ticker[ticker][d] for d in dates])
        out[ticker] = ReturnSeries(ticker, dates, returns)
    return out


def write_returns(path: Path | str, series: Iterable[ReturnSeries]) -> None:
    """Write series in the same long CSV format load_returns ingests."""
    ordered = sorted(series, key=lambda s: s.ticker)
    rows = (
        (d.isoformat(), s.ticker, fmt(r))
        for s in ordered
        for d, r in zip(s.dates, s.returns)
    )
    write_csv(path, RETURNS_HEADER, rows)


def default_catalog_path() -> Path:
    """Path of the packaged fund catalog (20 triple-levered pairs)."""
    return Path(str(_pkg_files("smclab").joinpath("data/default_catalog.csv")))


def load_catalog(path: Path | str | None = None) -> list[FundSpec]:
    """Load fund specs; None loads the packaged default catalog."""
    if path is None:
        path = default_catalog_path()
    rows, first_line = _open_rows(path, CATALOG_HEADER)
    specs = []
    seen: set[str] = set()
    for offset, row in enumerate(rows):
        line = first_line + offset
        if len(row) != len(CATALOG_HEADER):
            raise DataError(
                f"{path}: line {line}: expected {len(CATALOG_HEADER)} fields, got {len(row)}"
            )
        ticker, issuer, side, beta, fee, index_ticker, fund_name, index_name = (
            field.strip() for field in row
        )
        try:
            spec = FundSpec(
                ticker=ticker,
                issuer=issuer,
                side=side,
                beta=float(beta),
                annual_fee=float(fee),
                index_ticker=index_ticker,
                fund_name=fund_name,
                index_name=index_name,
            )
        except (ValueError, DataError) as exc:
            raise DataError(f"{path}: line {line}: {exc}") from exc
        if ticker in seen:
            raise DataError(f"{path}: line {line}: duplicate ticker {ticker}")
        seen.add(ticker)
        specs.append(spec)
    return specs


def write_catalog(path: Path | str, specs: Iterable[FundSpec]) -> None:
    rows = (
        (
            s.ticker,
            s.issuer,
            s.side,
            fmt(s.beta),
            fmt(s.annual_fee),
            s.index_ticker,
            s.fund_name,
            s.index_name,
        )
        for s in specs
    )
    write_csv(path, CATALOG_HEADER, rows)


def align(letf: ReturnSeries, index: ReturnSeries, spec: FundSpec) -> AlignedPair:
    """Restrict both series to their common dates, preserving order.

    Idempotent; raises AlignmentError when the date sets are disjoint.
    """
    common = sorted(set(letf.dates) & set(index.dates))
    if not common:
        raise AlignmentError(
            f"align[{spec.ticker}]: no common dates between {letf.ticker} and {index.ticker}"
        )
    keep = set(common)
    letf_idx = [i for i, d in enumerate(letf.dates) if d in keep]
    index_idx = [i for i, d in enumerate(index.dates) if d in keep]
    return AlignedPair(
        letf=ReturnSeries(letf.ticker, tuple(common), letf.returns[letf_idx]),
        index=ReturnSeries(index.ticker, tuple(common), index.returns[index_idx]),
        spec=spec,
        dropped_letf=len(letf) - len(common),
        dropped_index=len(index) - len(common),
    )


# --------------------------------------------------------------------------
# Output writers. Records are duck-typed (windows/region/convexity objects)
# so this module stays import-light.
# --------------------------------------------------------------------------

WINDOW_HEADER = ["ticker", "index", "end_date", "p", "beta",
                 "r_index", "r_letf", "r_max", "smc", "sn2", "class"]


def _bool(b: bool) -> str:
    return "true" if b else "false"


def write_curves(path: Path | str, rows: Iterable) -> None:
    """Curve family CSV `beta,p,x,y_daily,y_periodic`; p = -1 encodes infinity."""
    write_csv(
        path,
        ["beta", "p", "x", "y_daily", "y_periodic"],
        (
            (fmt(r.beta), "-1" if math.isinf(r.p) else str(int(r.p)),
             fmt(r.x), fmt(r.y_daily), fmt(r.y_periodic))
            for r in rows
        ),
    )


def _window_row(r) -> tuple:
    return (
        r.ticker, r.index_ticker, r.end_date.isoformat(), str(r.p), fmt(r.beta),
        fmt(r.r_index), fmt(r.r_letf), fmt(r.r_max), fmt(r.smc), fmt(r.sn2),
        r.convexity_class,
    )


def write_window_records(path: Path | str, records: Iterable) -> None:
    write_csv(path, WINDOW_HEADER, (_window_row(r) for r in records))


def write_window_records_jsonl(path: Path | str, records: Iterable) -> None:
    """One JSON object per window, keys matching the CSV header."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for r in records:
            obj = {
                "ticker": r.ticker,
                "index": r.index_ticker,
                "end_date": r.end_date.isoformat(),
                "p": r.p,
                "beta": r.beta,
                "r_index": r.r_index,
                "r_letf": r.r_letf,
                "r_max": r.r_max,
                "smc": json_safe(r.smc),
                "sn2": json_safe(r.sn2),
                "class": r.convexity_class,
            }
            f.write(json.dumps(obj, allow_nan=False) + "\n")


def write_ticker_summaries(path: Path | str, summaries: Iterable) -> None:
    header = [
        "ticker", "index", "p", "beta", "obs",
        "mean_sn2", "median_sn2", "range_sn2", "var_sn2", "skew_sn2", "kurt_sn2",
        "mean_smc", "median_smc", "range_smc", "var_smc", "skew_smc", "kurt_smc",
        "larger_range", "larger_variance", "larger_skewness", "larger_kurtosis",
    ]
    rows = []
    for s in summaries:
        a, b = s.sn2_stats, s.smc_stats
        rows.append(
            (
                s.ticker, s.index_ticker, str(s.p), fmt(s.beta), str(s.obs),
                fmt(a.mean), fmt(a.median), fmt(a.range), fmt(a.variance),
                fmt(a.skewness), fmt(a.kurtosis),
                fmt(b.mean), fmt(b.median), fmt(b.range), fmt(b.variance),
                fmt(b.skewness), fmt(b.kurtosis),
                s.larger_range, s.larger_variance, s.larger_skewness, s.larger_kurtosis,
            )
        )
    write_csv(path, header, rows)


def write_rankings(path: Path | str, rankings: Iterable[tuple[str, int, Iterable]]) -> None:
    """Rankings CSV; `rankings` holds (side, p, rows) groups."""
    header = ["side", "p", "rank", "ticker_by_sn2", "mean_sn2",
              "ticker_by_smc", "mean_smc", "disagreement", "tie_sn2", "tie_smc"]
    out = []
    for side, p, rows in rankings:
        for r in rows:
            out.append(
                (side, str(p), str(r.rank), r.ticker_by_sn2, fmt(r.mean_sn2),
                 r.ticker_by_smc, fmt(r.mean_smc), _bool(r.disagreement),
                 _bool(r.tie_sn2), _bool(r.tie_smc))
            )
    write_csv(path, header, out)


def write_boundary(path: Path | str, curves: Iterable) -> None:
    write_csv(
        path,
        ["beta", "r1", "r2"],
        (
            (fmt(c.beta), fmt(float(r1)), fmt(float(r2)))
            for c in curves
            for r1, r2 in c.points
        ),
    )


def write_membership(path: Path | str, grids: Iterable[tuple[float, "np.ndarray", "np.ndarray"]]) -> None:
    """Region-sample CSV `beta,r1,r2,member` from (beta, axis, members) grids."""
    def rows():
        for beta, axis, members in grids:
            b = fmt(beta)
            for i, r2 in enumerate(axis):
                for j, r1 in enumerate(axis):
                    yield (b, fmt(float(r1)), fmt(float(r2)), _bool(bool(members[i, j])))
    write_csv(path, ["beta", "r1", "r2", "member"], rows())


def write_acf_pacf(path: Path | str, diag) -> None:
    write_csv(
        path,
        ["lag", "acf", "pacf", "band"],
        (
            (str(k), fmt(float(diag.acf[k])), fmt(float(diag.pacf[k])), fmt(diag.band))
            for k in range(len(diag.acf))
        ),
    )


def write_qq(path: Path | str, diag) -> None:
    write_csv(
        path,
        ["theoretical_q", "sample_q"],
        ((fmt(float(t)), fmt(float(s))) for t, s in diag.qq_points),
    )


def write_counterexamples(path: Path | str, report) -> None:
    write_csv(
        path,
        ["index", "end_date", "beta", "long_smc", "short_smc"],
        (
            (i.index_ticker, i.end_date.isoformat(), fmt(i.beta),
             fmt(i.long_smc), fmt(i.short_smc))
            for i in report.instances
        ),
    )


def write_scan_totals(path: Path | str, report, p: int, betas: Sequence[float]) -> None:
    write_csv(
        path,
        ["p", "betas", "scanned", "skipped", "compared", "flagged"],
        [
            (
                str(p),
                ";".join(fmt(abs(float(b))) for b in sorted({abs(float(b)) for b in betas})),
                str(report.scanned), str(report.skipped),
                str(report.compared), str(report.flagged),
            )
        ],
    )
