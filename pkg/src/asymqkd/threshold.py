"""Total-noise thresholds for the protocol variants along channel rays.

A channel family is a ray through the simplex of error distributions:
a fixed direction (d_x, d_y, d_z), scaled by the total noise.  For each
protocol variant, ``is_distillable`` decides whether a secret key is
obtainable at one point of the ray, and ``threshold_total_noise`` brackets
the feasible/infeasible transition by bisection after auditing that the
transition along the ray is monotone (a non-monotone flip is reported as
an error instead of being silently bisected).

For the two-way variants, feasibility combines the capped schedule search
(which yields a concrete (m, k) witness when it succeeds) with the exact
unbounded-caps criterion ``distillable_in_limit``.  Near threshold the
witness search alone is far too conservative: the required parity group
size grows without bound, so truncating at k_max would report a threshold
several percentage points low.  The limit criterion is algebraic and
exact, which keeps bisection both honest and fast.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

from .channel import Basis, BasisMixture, PauliRates, average_over_mixture, conjugate
from .distill import DistillationTrace, distill_schedule, distillable_in_limit
from .keyrates import rate_single_basis, rate_sixstate_separate


class ProtocolVariant(enum.Enum):
    """Which preprocessing and reconciliation strategy to score."""

    Y_BASIS_TWO_WAY = "ybasis"
    CHAU_BASELINE = "chau"
    SINGLE_BASIS_ONE_WAY = "single-basis"
    SIX_STATE_SEPARATE_ONE_WAY = "sixstate-separate"


class ThresholdSearchError(Exception):
    """Raised when a threshold cannot be located along a family ray."""


class NonMonotoneFamilyError(ThresholdSearchError):
    """Distillability flipped more than once along the audited grid."""


class NoThresholdInRange(ThresholdSearchError):
    """The variant is still feasible at the maximum scale of the ray."""


@dataclass(frozen=True)
class SearchParams:
    """Residual-error target and caps for the schedule witness search."""

    target: float = 0.05
    m_max: int = 60
    k_max: int = 2001

    def __post_init__(self) -> None:
        if not 0.0 < self.target < 0.5:
            raise ValueError(f"target={self.target!r} outside (0, 0.5)")
        if self.m_max < 0 or self.k_max < 1:
            raise ValueError("caps must satisfy m_max >= 0, k_max >= 1")


@dataclass(frozen=True)
class ChannelFamily:
    """Ray of channels: error components = scale * direction.

    ``direction`` is normalized to sum to one so ``scale`` equals the total
    noise q_x + q_y + q_z.  The identity component 1 - scale stays
    nonnegative for scale <= 1, which is the full usable range.
    """

    direction: tuple[float, float, float]

    def __post_init__(self) -> None:
        d = tuple(float(c) for c in self.direction)
        if len(d) != 3 or any(not math.isfinite(c) or c < 0.0 for c in d):
            raise ValueError(f"direction must be three finite nonnegative components, got {d}")
        total = sum(d)
        if total <= 0.0:
            raise ValueError("direction must have positive total weight")
        object.__setattr__(self, "direction", tuple(c / total for c in d))

    @classmethod
    def from_y_ratio(cls, ratio: float) -> "ChannelFamily":
        """Family with q_x = q_z and q_y / q_x = ratio."""
        if ratio < 0.0:
            raise ValueError(f"ratio must be nonnegative, got {ratio}")
        return cls((1.0, ratio, 1.0))

    @property
    def y_ratio(self) -> float:
        """q_y / q_x along the ray; NaN when the ray has no X component."""
        d_x, d_y, _ = self.direction
        return d_y / d_x if d_x > 0.0 else math.nan

    @property
    def scale_max(self) -> float:
        return 1.0

    def rates_at(self, scale: float) -> PauliRates:
        if not 0.0 <= scale <= self.scale_max:
            raise ValueError(f"scale={scale!r} outside [0, {self.scale_max}]")
        d_x, d_y, d_z = self.direction
        return PauliRates(1.0 - scale, scale * d_x, scale * d_y, scale * d_z)


def is_distillable(
    rates: PauliRates,
    variant: ProtocolVariant,
    params: SearchParams = SearchParams(),
) -> tuple[bool, Optional[DistillationTrace]]:
    """Decide key feasibility for one channel under one variant.

    One-way variants reduce to the sign of the corresponding key rate and
    carry no trace.  Two-way variants first map the channel to the error
    distribution their key bits experience (Y-conjugation for the Y-basis
    protocol, the equal three-basis average for the baseline), then accept
    if either the capped schedule search finds a witness or the unbounded
    limit criterion holds.
    """
    if variant is ProtocolVariant.SINGLE_BASIS_ONE_WAY:
        return rate_single_basis(rates) > 0.0, None
    if variant is ProtocolVariant.SIX_STATE_SEPARATE_ONE_WAY:
        return rate_sixstate_separate(rates) > 0.0, None
    if variant is ProtocolVariant.Y_BASIS_TWO_WAY:
        effective = conjugate(rates, Basis.Y)
    elif variant is ProtocolVariant.CHAU_BASELINE:
        effective = average_over_mixture(rates, BasisMixture.equal())
    else:
        raise ValueError(f"unknown variant {variant!r}")
    trace = distill_schedule(effective, params.target, params.m_max, params.k_max)
    return trace.succeeded or distillable_in_limit(effective), trace


@dataclass(frozen=True)
class Bracket:
    low: float
    high: float


@dataclass(frozen=True)
class ThresholdResult:
    """Bisection outcome: feasible at ``bracket.low``, infeasible at ``bracket.high``.

    ``trace_at_threshold`` is the schedule trace at the last feasible probe
    (None for one-way variants).  Its ``succeeded`` flag can be False when
    feasibility just below threshold rests on the limit criterion rather
    than on a witness within the search caps.
    """

    threshold: float
    bracket: Bracket
    trace_at_threshold: Optional[DistillationTrace]


def _audit_and_bisect(feasible, lo: float, hi: float, tol: float, audit_points: int):
    """Bisect a monotone predicate after a grid audit of its monotonicity.

    Returns (low, high, payload_at_low) with high - low <= tol.  ``feasible``
    maps a scale to (bool, payload).
    """
    n = max(audit_points, 3)
    grid = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    flags = []
    payloads = []
    for scale in grid:
        ok, payload = feasible(scale)
        flags.append(ok)
        payloads.append(payload)
    if not flags[0]:
        raise ThresholdSearchError(f"not feasible at scale {grid[0]!r}; no threshold to bracket")
    if flags[-1]:
        raise NoThresholdInRange(f"still feasible at maximum scale {grid[-1]!r}")
    flip = flags.index(False)
    if any(flags[flip:]):
        raise NonMonotoneFamilyError(
            f"feasibility flips more than once along the ray (audit flags {flags})"
        )
    low, high = grid[flip - 1], grid[flip]
    payload_low = payloads[flip - 1]
    while high - low > tol:
        mid = 0.5 * (low + high)
        ok, payload = feasible(mid)
        if ok:
            low, payload_low = mid, payload
        else:
            high = mid
    return low, high, payload_low


def threshold_total_noise(
    family: ChannelFamily,
    variant: ProtocolVariant,
    tol: float = 1e-4,
    params: SearchParams = SearchParams(),
    audit_points: int = 50,
) -> ThresholdResult:
    """Locate the total-noise threshold of ``variant`` along ``family``.

    Runs ``is_distillable`` on an ``audit_points``-long grid first; the
    sequence must be feasible at scale zero, infeasible at the top of the
    ray and flip exactly once.  The flip cell is then bisected to ``tol``.
    """
    if tol <= 0.0:
        raise ValueError(f"tol={tol!r} must be positive")

    def feasible(scale: float):
        return is_distillable(family.rates_at(scale), variant, params)

    low, high, trace = _audit_and_bisect(feasible, 0.0, family.scale_max, tol, audit_points)
    return ThresholdResult(
        threshold=0.5 * (low + high),
        bracket=Bracket(low, high),
        trace_at_threshold=trace,
    )


@dataclass(frozen=True)
class Fig1Row:
    """One ratio point of the threshold-versus-asymmetry sweep."""

    y_ratio: float
    q_y0_at_threshold: float
    threshold_ybasis: float
    threshold_chau: float
    error: Optional[str] = field(default=None)


def sweep_fig1(
    ratios,
    tol: float = 1e-4,
    params: SearchParams = SearchParams(),
) -> list[Fig1Row]:
    """Two-way thresholds along q_x = q_z rays for a grid of q_y/q_x ratios.

    ``q_y0_at_threshold`` reports the absolute q_y component of the channel
    at the Y-basis protocol's threshold, which is the natural abscissa when
    plotting threshold against channel asymmetry.  Per-point failures are
    recorded in the row (NaN values plus the error message) and do not stop
    the sweep.
    """
    rows: list[Fig1Row] = []
    for ratio in ratios:
        try:
            family = ChannelFamily.from_y_ratio(ratio)
            thr_y = threshold_total_noise(family, ProtocolVariant.Y_BASIS_TWO_WAY, tol, params)
            thr_c = threshold_total_noise(family, ProtocolVariant.CHAU_BASELINE, tol, params)
        except (ThresholdSearchError, ValueError) as exc:
            rows.append(Fig1Row(ratio, math.nan, math.nan, math.nan, error=str(exc)))
            continue
        q_y0 = family.rates_at(thr_y.threshold).q_y
        rows.append(Fig1Row(ratio, q_y0, thr_y.threshold, thr_c.threshold))
    return rows
