"""Matplotlib rendering of the CSV outputs, used by the CLI --plot flag.

Every figure here is a view of data that is also written as CSV; the
delimited files remain the canonical output. Files are PNG, rendered
with the Agg backend so no display is needed.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_curves",
    "plot_region",
    "plot_qq",
    "plot_acf_pacf",
    "plot_rankings",
    "plot_window_scatter",
]

DPI = 150


def _save(fig, path: Path | str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_curves(rows: Sequence, path: Path | str) -> None:
    """Daily vs. periodic leverage curves, one panel per multiple."""
    betas = sorted({r.beta for r in rows})
    ncols = min(3, len(betas))
    nrows = math.ceil(len(betas) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.4 * nrows), squeeze=False)
    for ax, beta in zip(axes.flat, betas):
        sub = [r for r in rows if r.beta == beta]
        for p in sorted({r.p for r in sub}):
            pts = sorted((r.x, r.y_daily) for r in sub if r.p == p)
            label = "p=inf" if math.isinf(p) else f"p={int(p)}"
            ax.plot([a for a, _ in pts], [b for _, b in pts], label=label)
        per = sorted((r.x, r.y_periodic) for r in sub)
        ax.plot([a for a, _ in per], [b for _, b in per], "k--", lw=1, label="periodic")
        ax.set_title(f"beta = {beta:g}")
        ax.set_xlabel("index period return")
        ax.set_ylabel("leveraged return")
        ax.legend(fontsize=7)
    for ax in axes.flat[len(betas):]:
        ax.set_axis_off()
    _save(fig, path)


def plot_region(
    results: Sequence[tuple[float, np.ndarray, np.ndarray, object]], path: Path | str
) -> None:
    """Membership shading plus traced boundary, one panel per multiple.

    `results` holds (beta, axis, members, BoundaryCurve) tuples.
    """
    fig, axes = plt.subplots(1, len(results), figsize=(4.6 * len(results), 4.2), squeeze=False)
    for ax, (beta, axis, members, curve) in zip(axes.flat, results):
        ax.pcolormesh(axis, axis, members.astype(float), cmap="Blues", vmin=0, vmax=1.6)
        if len(curve.points):
            ax.plot(curve.points[:, 0], curve.points[:, 1], ".", color="crimson", ms=1.2)
        box = curve.box
        ax.plot([-box, box, box, -box, -box], [-box, -box, box, box, -box], "r-", lw=1)
        ax.set_title(f"{beta:g}x leverage")
        ax.set_xlabel("day 1 return")
        ax.set_ylabel("day 2 return")
        ax.set_aspect("equal")
    _save(fig, path)


def plot_qq(diag, path: Path | str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    ax.plot(diag.qq_points[:, 0], diag.qq_points[:, 1], ".", ms=2)
    lim = np.nanmax(np.abs(diag.qq_points)) if len(diag.qq_points) else 1.0
    ax.plot([-lim, lim], [-lim, lim], "r-", lw=1)
    ax.set_xlabel("normal quantile")
    ax.set_ylabel("sample quantile")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_acf_pacf(diag, path: Path | str, title: str = "") -> None:
    fig, axes = plt.subplots(1, 2, figsize=(8.6, 3.4))
    lags = np.arange(len(diag.acf))
    for ax, values, name in ((axes[0], diag.acf, "ACF"), (axes[1], diag.pacf, "PACF")):
        ax.vlines(lags[1:], 0, values[1:])
        ax.plot(lags[1:], values[1:], "o", ms=3)
        ax.axhline(0, color="black", lw=0.8)
        ax.axhline(diag.band, color="red", lw=0.8, ls="--")
        ax.axhline(-diag.band, color="red", lw=0.8, ls="--")
        ax.set_title(f"{name} {title}".strip())
        ax.set_xlabel("lag")
    _save(fig, path)


def plot_rankings(rankings: Sequence[tuple[str, int, Sequence]], path: Path | str) -> None:
    """Mean SN2 and SMC by rank, one panel per (side, p) leaderboard."""
    fig, axes = plt.subplots(1, len(rankings), figsize=(4.6 * len(rankings), 4.2), squeeze=False)
    for ax, (side, p, rows) in zip(axes.flat, rankings):
        ranks = [r.rank for r in rows]
        ax.plot([r.mean_sn2 for r in rows], ranks, "o-", label="mean SN2")
        ax.plot([r.mean_smc for r in rows], ranks, "s-", label="mean SMC")
        for r in rows:
            star = "**" if r.disagreement else ""
            ax.annotate(f"{r.ticker_by_sn2}{star}", (r.mean_sn2, r.rank), fontsize=7,
                        xytext=(3, 3), textcoords="offset points")
            ax.annotate(f"{r.ticker_by_smc}{star}", (r.mean_smc, r.rank), fontsize=7,
                        xytext=(3, -9), textcoords="offset points")
        ax.invert_yaxis()
        ax.set_title(f"{side} side, p = {p}")
        ax.set_xlabel("sample mean")
        ax.set_ylabel("rank")
        ax.legend(fontsize=7)
    _save(fig, path)


def plot_window_scatter(
    groups: Sequence[tuple[str, Iterable]], path: Path | str, envelope=None
) -> None:
    """Index vs. fund period returns per group, with the r_max envelope.

    `groups` holds (label, records) pairs; `envelope` is a callable
    (x, beta) -> y used to draw the reachable upper bound.
    """
    fig, axes = plt.subplots(1, len(groups), figsize=(4.6 * len(groups), 4.2), squeeze=False)
    for ax, (label, records) in zip(axes.flat, groups):
        records = list(records)
        xs = np.array([r.r_index for r in records])
        ys = np.array([r.r_letf for r in records])
        ax.plot(xs, ys, ".", color="seagreen", ms=2.5)
        if records and envelope is not None:
            beta = records[0].beta
            grid = np.linspace(xs.min(), xs.max(), 200)
            p = records[0].p
            ax.plot(grid, [envelope(float(x), p, beta) for x in grid], "b-", lw=1,
                    label="max convexity")
            ax.plot(grid, np.maximum(-1.0, beta * grid), color="purple", lw=1,
                    label="periodic")
            ax.legend(fontsize=7)
        ax.set_title(label)
        ax.set_xlabel("index return")
        ax.set_ylabel("fund return")
    _save(fig, path)
