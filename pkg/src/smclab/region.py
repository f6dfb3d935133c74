"""Where a 2-day long fund shortfall exceeds the short fund shortfall.

For a 2-day index window (r1, r2) and synthetic funds returning exactly
+beta and -beta times the index daily, the uncensored shortfalls are

    long  = (1 + beta*rbar)^2  / ((1 + beta*r1) (1 + beta*r2)) - 1
    short = (1 - beta*rbar)^2  / ((1 - beta*r1) (1 - beta*r2)) - 1

with rbar = sqrt((1+r1)(1+r2)) - 1. The short side is almost always
larger; this module computes the exceptional region where long > short
and traces its curved equality boundary. The region is symmetric in
(r1, r2), vanishes at beta = 1, and its boundary crosses the r2 = 0
axis at r1 = -1/beta^2. Equality also holds identically on the main
diagonal r1 = r2, which the tracer excludes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidInputError

__all__ = [
    "admissible_half_width",
    "pure_smc_pair",
    "region_membership",
    "membership_grid",
    "BoundaryCurve",
    "equality_boundary",
    "BISECT_TOL",
]

# Bisection stops when |long - short| at the midpoint is below this;
# the values are O(1), so double precision leaves ample headroom.
BISECT_TOL = 1e-10

# The scan box stops just inside the returns admissible for the
# leverage multiple, |beta * r| < 1.
BOX_MARGIN = 1e-6


def admissible_half_width(beta: float) -> float:
    """Half-width of the scan box: 1/|beta| - margin."""
    return 1.0 / abs(beta) - BOX_MARGIN


def _check_admissible(r1: float, r2: float, beta: float) -> None:
    if r1 <= -1.0 or r2 <= -1.0:
        raise DomainError(f"2-day window ({r1}, {r2}): returns must be > -1")
    if abs(beta * r1) >= 1.0 or abs(beta * r2) >= 1.0:
        raise DomainError(
            f"2-day window ({r1}, {r2}) inadmissible at beta={beta}: |beta*r| >= 1"
        )


def pure_smc_pair(r1: float, r2: float, beta: float) -> tuple[float, float]:
    """Uncensored (long, short) shortfalls for the synthetic +/-beta pair."""
    beta = abs(beta)
    _check_admissible(r1, r2, beta)
    # r1 == r2 means the geometric mean IS the daily return; computing it
    # through sqrt would break the exact equality of both shortfalls at 0.
    rbar = r1 if r1 == r2 else math.sqrt((1.0 + r1) * (1.0 + r2)) - 1.0
    long_side = (1.0 + beta * rbar) ** 2 / ((1.0 + beta * r1) * (1.0 + beta * r2)) - 1.0
    short_side = (1.0 - beta * rbar) ** 2 / ((1.0 - beta * r1) * (1.0 - beta * r2)) - 1.0
    return long_side, short_side


def region_membership(r1: float, r2: float, beta: float) -> bool:
    """True iff the long shortfall strictly exceeds the short shortfall."""
    long_side, short_side = pure_smc_pair(r1, r2, beta)
    return long_side > short_side


def _gap_vec(r1: np.ndarray, r2: np.ndarray, beta: float) -> np.ndarray:
    rbar = np.where(r1 == r2, r1, np.sqrt((1.0 + r1) * (1.0 + r2)) - 1.0)
    long_side = (1.0 + beta * rbar) ** 2 / ((1.0 + beta * r1) * (1.0 + beta * r2))
    short_side = (1.0 - beta * rbar) ** 2 / ((1.0 - beta * r1) * (1.0 - beta * r2))
    return long_side - short_side


def membership_grid(beta: float, resolution: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """Grid axis and boolean membership matrix (rows r2, columns r1)."""
    beta = abs(beta)
    axis = np.linspace(-admissible_half_width(beta), admissible_half_width(beta), resolution + 1)
    r1, r2 = np.meshgrid(axis, axis)
    return axis, _gap_vec(r1, r2, beta) > 0.0


@dataclass(frozen=True)
class BoundaryCurve:
    """Polyline of equality points long == short, diagonal excluded.

    Points are ordered by the (r2, r1) line scan that produced them.
    `box` is the half-width of the admissible square that was scanned.
    An empty curve carries an explanatory `status`.
    """

    beta: float
    points: np.ndarray = field(repr=False)
    box: float
    status: str = "ok"


def _bisect_gap(beta: float, r2: float, lo: float, hi: float) -> float | None:
    """Root of the gap in (lo, hi), or None if not resolvable to BISECT_TOL."""
    f_lo = float(_gap_vec(np.asarray(lo), np.asarray(r2), beta))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = float(_gap_vec(np.asarray(mid), np.asarray(r2), beta))
        if abs(f_mid) <= BISECT_TOL:
            return mid
        if hi - lo <= 4.0 * np.finfo(float).eps * max(1.0, abs(mid)):
            return None
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return None


def equality_boundary(beta: float, resolution: int = 400) -> BoundaryCurve:
    """Trace the equality boundary by scanning grid lines and bisecting.

    Each horizontal line r2 = const is scanned for sign changes of
    (long - short) in r1; each bracket is bisected to BISECT_TOL. Roots
    that land on the main diagonal are dropped. The mirrored points
    (r2, r1) are appended, which by symmetry are the vertical-line
    scans. At |beta| = 1 the long shortfall is identically 0, no region
    exists, and an empty curve is returned.
    """
    beta = abs(beta)
    if beta < 1.0:
        raise InvalidInputError(f"equality_boundary: |beta| must be >= 1, got {beta}")
    if resolution < 8:
        raise InvalidInputError(f"equality_boundary: resolution too small ({resolution})")
    box = admissible_half_width(beta)
    if beta == 1.0:
        return BoundaryCurve(
            beta=beta,
            points=np.empty((0, 2)),
            box=box,
            status="no region at beta=1: long shortfall is identically 0",
        )
    axis = np.linspace(-box, box, resolution + 1)
    step = axis[1] - axis[0]
    found: list[tuple[float, float]] = []
    for r2 in axis:
        gaps = _gap_vec(axis, np.full_like(axis, r2), beta)
        sign_change = np.nonzero(np.sign(gaps[1:]) != np.sign(gaps[:-1]))[0]
        for i in sign_change:
            root = _bisect_gap(beta, float(r2), float(axis[i]), float(axis[i + 1]))
            if root is None:
                continue
            # the diagonal is an equality locus of its own; skip roots on it
            if abs(root - r2) <= 2.0 * step:
                continue
            found.append((root, float(r2)))
    mirrored = [(r2, r1) for r1, r2 in found]
    points = np.array(found + mirrored) if found else np.empty((0, 2))
    status = "ok" if len(points) else "no equality points found"
    return BoundaryCurve(beta=beta, points=points, box=box, status=status)
