"""Shortfall-from-maximum-convexity analytics for leveraged fund returns."""

from .convexity import (
    CONVEXITY,
    DRAG,
    NEUTRAL,
    CurveRow,
    classify,
    convexity_gap,
    convexity_gap_expansion,
    emit_curve_family,
    limit_daily_curve,
    periodic_leverage,
    r_max,
)
from .data_io import (
    AlignedPair,
    FundSpec,
    align,
    default_catalog_path,
    load_catalog,
    load_returns,
    write_returns,
)
from .errors import (
    AlignmentError,
    CapacityError,
    DataError,
    DomainError,
    InvalidInputError,
    SmcLabError,
)
from .region import BoundaryCurve, equality_boundary, pure_smc_pair, region_membership
from .returns_core import (
    ReturnSeries,
    compound_return,
    geometric_mean_return,
    leveraged_daily_compound,
    log_returns,
)
from .simulate import IndexModel, LetfModel, gen_index, synth_letf
from .vol_stats import (
    Diagnostics,
    SmcInput,
    SummaryStats,
    diagnostics,
    smc,
    smc_from_totals,
    sn2,
    summary_stats,
    tracking_errors,
)
from .windows import (
    CounterexampleReport,
    RankingRow,
    TickerSummary,
    WindowRecord,
    counterexample_search,
    evaluate_windows,
    rank_by_mean,
    roll,
    summarize_by_ticker,
)

__version__ = "0.1.0"
