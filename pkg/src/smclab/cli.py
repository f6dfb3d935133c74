"""Command-line surface: batch analytics over return CSVs.

Every command reads flags (optionally backed by a TOML config file,
flags winning), writes plot-ready CSVs into the output directory, and
is deterministic given its inputs and seed. Exit codes: 0 success,
1 completed with warnings under --strict, 2 usage or data errors.
The output directory defaults to $SMCLAB_OUT, then ./smclab_out.
"""

from __future__ import annotations

import math
import sys
from functools import wraps
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from . import convexity, data_io
from . import region as region_mod
from . import simulate as simulate_mod
from . import vol_stats
from . import windows as windows_mod
from .errors import AlignmentError, DataError, SmcLabError

DEFAULT_BETAS = (-3.0, -2.0, -1.0, 1.0, 2.0, 3.0)
DEFAULT_PS = (21, 252)


class _DataExit(click.ClickException):
    exit_code = 2


def _guard(fn):
    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SmcLabError as exc:
            raise _DataExit(str(exc)) from exc

    return wrapper


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise _DataExit(f"config {path}: {exc}") from exc


def _pick(cli_value, cfg: dict, key: str, default):
    """Flag value if given, else config value, else default."""
    if cli_value not in (None, ()):
        return cli_value
    if key in cfg:
        value = cfg[key]
        return tuple(value) if isinstance(value, list) else value
    return default


def _outdir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


class WindowLength(click.ParamType):
    """A day count, or 'inf' for the limit curve."""

    name = "days"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float)):
            return float(value)
        text = str(value).strip().lower()
        if text in ("inf", "infinity"):
            return math.inf
        try:
            days = int(text)
        except ValueError:
            self.fail(f"{value!r} is not a day count or 'inf'", param, ctx)
        if days < 1:
            self.fail(f"window length must be >= 1, got {days}", param, ctx)
        return float(days)


WINDOW_LENGTH = WindowLength()

_out_option = click.option(
    "--out", envvar="SMCLAB_OUT", default="smclab_out", show_default=True,
    help="Output directory (or $SMCLAB_OUT).",
)
_config_option = click.option(
    "--config", "config_path", type=click.Path(), default=None,
    help="TOML config file; flags override its keys.",
)
_plot_option = click.option(
    "--plot", is_flag=True, help="Also render matplotlib figures next to the CSVs."
)


@click.group()
@click.version_option(package_name="smclab")
def main() -> None:
    """Shortfall-from-maximum-convexity analytics for leveraged fund returns."""


@main.command()
@click.option("--beta", "betas", multiple=True, type=float, help="Leverage multiple (repeatable).")
@click.option("--p", "ps", multiple=True, type=WINDOW_LENGTH,
              help="Window length in days, or 'inf' (repeatable).")
@click.option("--x", "xs", multiple=True, type=float,
              help="Explicit index-return grid point (repeatable; overrides the range flags).")
@click.option("--x-min", type=float, default=None)
@click.option("--x-max", type=float, default=None)
@click.option("--x-steps", type=int, default=None)
@_out_option
@_config_option
@_plot_option
@_guard
def curves(betas, ps, xs, x_min, x_max, x_steps, out, config_path, plot) -> None:
    """Emit the daily-compounding versus periodic leverage curve family."""
    cfg = _load_config(config_path)
    betas = [float(b) for b in _pick(betas, cfg, "beta", DEFAULT_BETAS)]
    ps = [WINDOW_LENGTH.convert(p, None, None) for p in _pick(ps, cfg, "p", DEFAULT_PS)]
    xs = _pick(xs, cfg, "x", ())
    if xs:
        grid = sorted(float(x) for x in xs)
    else:
        x_min = float(_pick(x_min, cfg, "x_min", -0.5))
        x_max = float(_pick(x_max, cfg, "x_max", 0.5))
        x_steps = int(_pick(x_steps, cfg, "x_steps", 101))
        if x_steps < 2 or not x_max > x_min:
            raise click.UsageError(f"bad grid: [{x_min}, {x_max}] with {x_steps} steps")
        grid = np.linspace(x_min, x_max, x_steps)
    rows = convexity.emit_curve_family(betas, ps, grid)
    outdir = _outdir(out)
    data_io.write_curves(outdir / "curves.csv", rows)
    click.echo(f"wrote {outdir / 'curves.csv'} ({len(rows)} rows)")
    if plot:
        from . import plotting

        plotting.plot_curves(rows, outdir / "curves.png")
        click.echo(f"wrote {outdir / 'curves.png'}")


@main.command(name="windows")
@click.option("--data", "data_path", type=click.Path(), default=None,
              help="Long CSV date,ticker,return.")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None,
              help="Fund catalog CSV (default: packaged catalog).")
@click.option("--p", "ps", multiple=True, type=int, help="Window length in days (repeatable).")
@click.option("--step", type=int, default=None, help="Window stride in days.")
@click.option("--strict", is_flag=True, help="Exit 1 if any warnings were emitted.")
@_out_option
@_config_option
@_plot_option
@_guard
def windows_cmd(data_path, catalog_path, ps, step, strict, out, config_path, plot) -> None:
    """Evaluate rolling windows for every catalog pair present in the data."""
    cfg = _load_config(config_path)
    data_path = _pick(data_path, cfg, "data", None)
    if data_path is None:
        raise click.UsageError("--data is required (flag or config key 'data')")
    catalog_path = _pick(catalog_path, cfg, "catalog", None)
    ps = [int(p) for p in _pick(ps, cfg, "p", DEFAULT_PS)]
    if any(p < 2 for p in ps):
        raise click.UsageError(f"window lengths must be >= 2, got {ps}")
    step = int(_pick(step, cfg, "step", 1))
    if step < 1:
        raise click.UsageError(f"step must be >= 1, got {step}")
    strict = bool(strict or cfg.get("strict", False))

    series = data_io.load_returns(data_path)
    catalog = data_io.load_catalog(catalog_path)
    warnings: list[str] = []
    pairs = []
    for spec in catalog:
        if spec.ticker not in series:
            warnings.append(f"no data for fund {spec.ticker}, skipped")
            continue
        if spec.index_ticker not in series:
            warnings.append(f"no data for index {spec.index_ticker} (fund {spec.ticker}), skipped")
            continue
        try:
            pairs.append(data_io.align(series[spec.ticker], series[spec.index_ticker], spec))
        except AlignmentError as exc:
            warnings.append(f"{exc}, skipped")
    if not pairs:
        raise DataError(f"{data_path}: no catalog fund/index pair has data")

    records = []
    for pair in pairs:
        for p in ps:
            recs = windows_mod.evaluate_windows(pair, p, step=step)
            if not recs:
                warnings.append(f"{pair.spec.ticker}: series shorter than p={p}")
            records.extend(recs)
    if not records:
        raise DataError("no window is evaluable at the requested lengths")

    outdir = _outdir(out)
    data_io.write_window_records(outdir / "records.csv", records)
    data_io.write_window_records_jsonl(outdir / "records.jsonl", records)
    summaries = windows_mod.summarize_by_ticker(records)
    data_io.write_ticker_summaries(outdir / "summary.csv", summaries)

    side_of = {spec.ticker: spec.side for spec in catalog}
    rankings = []
    for p in ps:
        for side in ("Long", "Short"):
            entries = [
                (s.ticker, s.sn2_stats.mean, s.smc_stats.mean)
                for s in summaries
                if s.p == p and side_of[s.ticker] == side
            ]
            if len(entries) >= 2:
                rankings.append((side, p, windows_mod.rank_by_mean(entries, side)))
            elif entries:
                warnings.append(f"p={p} {side}: fewer than 2 tickers, ranking skipped")
    data_io.write_rankings(outdir / "rankings.csv", rankings)

    for name in ("records.csv", "records.jsonl", "summary.csv", "rankings.csv"):
        click.echo(f"wrote {outdir / name}")
    if plot:
        from . import plotting

        if rankings:
            plotting.plot_rankings(rankings, outdir / "rankings.png")
            click.echo(f"wrote {outdir / 'rankings.png'}")
        by_group: dict[tuple[str, int], list] = {}
        for rec in records:
            by_group.setdefault((rec.index_ticker, rec.p), []).append(rec)
        for (index_ticker, p), recs in sorted(by_group.items()):
            groups = []
            for side in ("Long", "Short"):
                sub = [r for r in recs if side_of[r.ticker] == side]
                if sub:
                    groups.append((f"{sub[0].ticker} ({side}, p={p})", sub))
            if groups:
                png = outdir / f"scatter_{index_ticker}_p{p}.png"
                plotting.plot_window_scatter(groups, png, envelope=convexity.r_max)
                click.echo(f"wrote {png}")

    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    if strict and warnings:
        sys.exit(1)


@main.command()
@click.option("--beta", "betas", multiple=True, type=float, help="Leverage multiple (repeatable).")
@click.option("--resolution", type=int, default=None, show_default="400",
              help="Grid lines per axis for scanning and membership sampling.")
@_out_option
@_config_option
@_plot_option
@_guard
def region(betas, resolution, out, config_path, plot) -> None:
    """Trace the 2-day long>short equality boundary and sample the region."""
    cfg = _load_config(config_path)
    betas = [abs(float(b)) for b in _pick(betas, cfg, "beta", (2.0, 3.0))]
    resolution = int(_pick(resolution, cfg, "resolution", 400))
    curves_out = []
    grids = []
    results = []
    for beta in sorted(set(betas)):
        curve = region_mod.equality_boundary(beta, resolution)
        if curve.status != "ok":
            click.echo(f"beta={beta:g}: {curve.status}")
        axis, members = region_mod.membership_grid(beta, resolution)
        curves_out.append(curve)
        grids.append((beta, axis, members))
        results.append((beta, axis, members, curve))
    outdir = _outdir(out)
    data_io.write_boundary(outdir / "boundary.csv", curves_out)
    data_io.write_membership(outdir / "membership.csv", grids)
    click.echo(f"wrote {outdir / 'boundary.csv'}")
    click.echo(f"wrote {outdir / 'membership.csv'}")
    if plot:
        from . import plotting

        plotting.plot_region(results, outdir / "region.png")
        click.echo(f"wrote {outdir / 'region.png'}")


@main.command()
@click.option("--data", "data_path", type=click.Path(), default=None,
              help="Long CSV date,ticker,return; every ticker is treated as an index.")
@click.option("--catalog", "catalog_path", type=click.Path(), default=None,
              help="Restrict the scan to this catalog's index tickers.")
@click.option("--beta", "betas", multiple=True, type=float,
              help="Leverage magnitude for the synthetic pair (repeatable).")
@click.option("--p", type=int, default=None, show_default="21", help="Window length in days.")
@click.option("--step", type=int, default=None, show_default="1")
@_out_option
@_config_option
@_guard
def counterexamples(data_path, catalog_path, betas, p, step, out, config_path) -> None:
    """Search index windows where the long-side SMC beats the short side."""
    cfg = _load_config(config_path)
    data_path = _pick(data_path, cfg, "data", None)
    if data_path is None:
        raise click.UsageError("--data is required (flag or config key 'data')")
    betas = [float(b) for b in _pick(betas, cfg, "beta", (1.0, 2.0, 3.0))]
    p = int(_pick(p, cfg, "p", 21))
    if p < 2:
        raise click.UsageError(f"p must be >= 2, got {p}")
    step = int(_pick(step, cfg, "step", 1))
    series = data_io.load_returns(data_path)
    catalog_path = _pick(catalog_path, cfg, "catalog", None)
    if catalog_path is not None:
        catalog = data_io.load_catalog(catalog_path)
        tickers = sorted({s.index_ticker for s in catalog if s.index_ticker in series})
    else:
        tickers = sorted(series)
    if not tickers:
        raise DataError(f"{data_path}: no index series to scan")
    report = windows_mod.counterexample_search([series[t] for t in tickers], betas, p, step)
    outdir = _outdir(out)
    data_io.write_counterexamples(outdir / "counterexamples.csv", report)
    data_io.write_scan_totals(outdir / "scan_totals.csv", report, p, betas)
    click.echo(
        f"scanned {report.scanned} windows ({report.skipped} skipped): "
        f"{report.flagged} with long SMC > short SMC"
    )
    click.echo(f"wrote {outdir / 'counterexamples.csv'}")
    click.echo(f"wrote {outdir / 'scan_totals.csv'}")


@main.command()
@click.option("--kind", type=click.Choice(simulate_mod.INDEX_KINDS), default=None,
              show_default="iid_normal")
@click.option("--mean", type=float, default=None, show_default="0.0",
              help="Daily drift of log returns (simple return for kind=constant).")
@click.option("--vol", type=float, default=None, show_default="0.02",
              help="Daily standard deviation of log returns.")
@click.option("--extra", type=float, default=None,
              help="Student-t degrees of freedom, or AR(1) coefficient.")
@click.option("--n", type=int, default=None, show_default="2520", help="Days to generate.")
@click.option("--seed", type=int, default=None, show_default="0")
@click.option("--index-ticker", default=None, show_default="SIMIDX")
@click.option("--beta", type=float, default=None,
              help="Also synthesize a fund at this multiple.")
@click.option("--fee", type=float, default=None, show_default="0.0",
              help="Annual management fee of the synthetic fund.")
@click.option("--error-sd", type=float, default=None, show_default="0.0",
              help="Daily tracking-error standard deviation.")
@click.option("--letf-seed", type=int, default=None,
              help="Tracking-error stream seed (default: seed + 1).")
@click.option("--letf-ticker", default=None, show_default="SIMLETF")
@_out_option
@_config_option
@_guard
def simulate(kind, mean, vol, extra, n, seed, index_ticker, beta, fee, error_sd,
             letf_seed, letf_ticker, out, config_path) -> None:
    """Generate seeded synthetic index (and optional fund) return data."""
    cfg = _load_config(config_path)
    kind = _pick(kind, cfg, "kind", "iid_normal")
    mean = float(_pick(mean, cfg, "mean", 0.0))
    vol = float(_pick(vol, cfg, "vol", 0.02))
    extra = _pick(extra, cfg, "extra", None)
    n = int(_pick(n, cfg, "n", 2520))
    seed = int(_pick(seed, cfg, "seed", 0))
    index_ticker = _pick(index_ticker, cfg, "index_ticker", "SIMIDX")
    beta = _pick(beta, cfg, "beta", None)
    model = simulate_mod.IndexModel(
        kind=kind, mean=mean, vol=vol,
        extra=None if extra is None else float(extra), seed=seed,
    )
    index = simulate_mod.gen_index(model, n, ticker=index_ticker)
    series = [index]
    specs = []
    if beta is not None:
        beta = float(beta)
        if beta == 0.0:
            raise click.UsageError("--beta must be nonzero")
        letf_ticker = _pick(letf_ticker, cfg, "letf_ticker", "SIMLETF")
        letf_model = simulate_mod.LetfModel(
            beta=beta,
            annual_fee=float(_pick(fee, cfg, "fee", 0.0)),
            error_sd=float(_pick(error_sd, cfg, "error_sd", 0.0)),
            seed=int(_pick(letf_seed, cfg, "letf_seed", seed + 1)),
        )
        series.append(simulate_mod.synth_letf(index, letf_model, ticker=letf_ticker))
        specs.append(
            data_io.FundSpec(
                ticker=letf_ticker,
                issuer="Synthetic",
                side="Long" if beta > 0 else "Short",
                beta=beta,
                annual_fee=letf_model.annual_fee,
                index_ticker=index_ticker,
                fund_name=f"Synthetic {beta:g}x {index_ticker}",
                index_name=f"Synthetic index {index_ticker}",
            )
        )
    outdir = _outdir(out)
    data_io.write_returns(outdir / "simulated.csv", series)
    click.echo(f"wrote {outdir / 'simulated.csv'} ({n} days, {len(series)} tickers)")
    if specs:
        data_io.write_catalog(outdir / "simulated_catalog.csv", specs)
        click.echo(f"wrote {outdir / 'simulated_catalog.csv'}")


@main.command()
@click.argument("ticker")
@click.option("--data", "data_path", type=click.Path(), default=None,
              help="Long CSV date,ticker,return.")
@click.option("--max-lag", type=int, default=None, show_default="20")
@click.option("--squared", is_flag=True, help="Use squared log returns for ACF/PACF.")
@_out_option
@_config_option
@_plot_option
@_guard
def diagnostics(ticker, data_path, max_lag, squared, out, config_path, plot) -> None:
    """QQ, ACF, and PACF diagnostics for one ticker's daily returns."""
    cfg = _load_config(config_path)
    data_path = _pick(data_path, cfg, "data", None)
    if data_path is None:
        raise click.UsageError("--data is required (flag or config key 'data')")
    max_lag = int(_pick(max_lag, cfg, "max_lag", 20))
    squared = bool(squared or cfg.get("squared", False))
    series = data_io.load_returns(data_path)
    if ticker not in series:
        raise DataError(f"{data_path}: no ticker {ticker}")
    returns = series[ticker].returns
    if float(np.max(returns)) == float(np.min(returns)):
        raise DataError(f"{ticker}: constant return series, diagnostics undefined")
    diag = vol_stats.diagnostics(returns, max_lag=max_lag, squared=squared)
    outdir = _outdir(out)
    qq_path = outdir / f"qq_{ticker}.csv"
    acf_path = outdir / f"acf_{ticker}.csv"
    data_io.write_qq(qq_path, diag)
    data_io.write_acf_pacf(acf_path, diag)
    click.echo(f"wrote {qq_path}")
    click.echo(f"wrote {acf_path}")
    if plot:
        from . import plotting

        tag = "squared log returns" if squared else "log returns"
        plotting.plot_qq(diag, outdir / f"qq_{ticker}.png", title=f"{ticker} {tag}")
        plotting.plot_acf_pacf(diag, outdir / f"acf_{ticker}.png", title=f"({ticker}, {tag})")
        click.echo(f"wrote {outdir / f'qq_{ticker}.png'}")
        click.echo(f"wrote {outdir / f'acf_{ticker}.png'}")


if __name__ == "__main__":
    main()
