"""Two-way post-processing maps: pair rejection and parity grouping.

The bit-error rejection step (B-step) pairs up key bits, compares pair
parities over the public channel and keeps one bit of each agreeing pair.
On a Bell-diagonal error distribution this acts coordinate-wise:

    q_i' = (q_i^2 + q_z^2) / D      q_x' = (q_x^2 + q_y^2) / D
    q_z' = 2 q_i q_z / D            q_y' = 2 q_x q_y / D

with D = (q_i + q_z)^2 + (q_x + q_y)^2 the pair-agreement probability; the
expected surviving fraction of key bits is D / 2 (one bit kept out of each
agreeing pair).  In the sum/difference coordinates u = q_i + q_z,
v = q_i - q_z, s = q_x + q_y, t = q_x - q_y the map is simply squaring
followed by renormalization, which is what makes the asymptotic analysis
in ``distillable_in_limit`` exact.

The parity step (P-step) replaces groups of k bits (k odd) by their
parity.  Bit errors XOR, so the new bit-flip rate is (1 - (1-2 p_x)^k)/2;
phase errors act like a repetition code decoded by majority vote, so the
new phase-flip rate is the upper binomial tail P[Bin(k, p_z) >= (k+1)/2].
Only the two marginals are tracked through a P-step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channel import FlipRates, PauliRates, flip_rates
from .keyrates import shannon4

_logfact = np.zeros(1)


def _log_factorials(n: int) -> np.ndarray:
    """Table of log(i!) for i = 0..n, grown on demand and cached."""
    global _logfact
    if n >= _logfact.size:
        start = _logfact.size
        extra = np.cumsum(np.log(np.arange(start, n + 1, dtype=float))) + _logfact[-1]
        _logfact = np.concatenate([_logfact, extra])
    return _logfact


def parity_bit_error(p_x: float, k: int) -> float:
    """Bit-flip rate of the parity of k independent bits: (1-(1-2p)^k)/2."""
    return 0.5 * (1.0 - (1.0 - 2.0 * p_x) ** k)


def majority_phase_error(p_z: float, k: int) -> float:
    """Phase-flip rate after majority decoding k bits: P[Bin(k, p) >= (k+1)/2].

    Computed through logarithms of factorials so large k neither overflows
    nor loses the tiny tails.
    """
    if p_z <= 0.0:
        return 0.0
    if p_z >= 1.0:
        return 1.0
    table = _log_factorials(k)
    j = np.arange((k + 1) // 2, k + 1)
    log_terms = (
        table[k]
        - table[j]
        - table[k - j]
        + j * math.log(p_z)
        + (k - j) * math.log1p(-p_z)
    )
    return float(min(np.exp(log_terms).sum(), 1.0))


@dataclass(frozen=True)
class BStepOutcome:
    """Post-rejection error distribution and expected surviving fraction."""

    rates_out: PauliRates
    survival: float


@dataclass(frozen=True)
class PStepParams:
    """Parity group size; must be odd so majority decoding is unambiguous."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"parity group size must be odd and >= 1, got {self.k}")


class PStepResult(NamedTuple):
    k: int
    p_x: float
    p_z: float


def b_step(rates: PauliRates) -> BStepOutcome:
    """One round of pair-parity rejection on a Bell-diagonal distribution."""
    q_i, q_x, q_y, q_z = rates.as_tuple()
    d = (q_i + q_z) ** 2 + (q_x + q_y) ** 2
    out = PauliRates(
        (q_i * q_i + q_z * q_z) / d,
        (q_x * q_x + q_y * q_y) / d,
        2.0 * q_x * q_y / d,
        2.0 * q_i * q_z / d,
    )
    return BStepOutcome(rates_out=out, survival=0.5 * d)


def p_step(flips: FlipRates, params: PStepParams) -> FlipRates:
    """Marginal flip rates of group parities; k = 1 is the identity.

    The returned p_y is NaN: parity grouping is modelled on the two
    marginals only, and nothing downstream consumes a combined-flip rate.
    """
    for name, p in (("p_x", flips.p_x), ("p_z", flips.p_z)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name}={p!r} outside [0, 1]")
    return FlipRates(
        p_x=parity_bit_error(flips.p_x, params.k),
        p_z=majority_phase_error(flips.p_z, params.k),
        p_y=math.nan,
    )


def modified_rate_one_bstep(rates: PauliRates) -> float:
    """Key rate after a single rejection round: survival * (1 - shannon4).

    ``rates`` must already be the error distribution experienced by the
    key bits (conjugate the channel first if the key lives in another
    basis).  Noiseless input gives exactly 1/2: half the bits are spent on
    the parity comparison.
    """
    outcome = b_step(rates)
    return outcome.survival * (1.0 - shannon4(outcome.rates_out))


@dataclass(frozen=True)
class DistillationTrace:
    """Record of a rejection/parity schedule applied to a distribution.

    ``rounds`` holds one entry per B-step in order, ``p_step`` the terminal
    parity stage, ``cumulative_survival`` the expected fraction of raw key
    bits that survive the whole schedule.  ``succeeded`` is False when the
    search gave up; the trace then shows the best attempt (smallest worst
    residual error) rather than raising.
    """

    rounds: tuple[BStepOutcome, ...]
    p_step: Optional[PStepResult]
    cumulative_survival: float
    succeeded: bool

    @property
    def final_errors(self) -> tuple[float, float]:
        """(bit, phase) error rates at the end of the schedule."""
        if self.p_step is not None:
            return (self.p_step.p_x, self.p_step.p_z)
        if self.rounds:
            f = flip_rates(self.rounds[-1].rates_out)
            return (f.p_x, f.p_z)
        raise ValueError("empty trace has no final errors")


def _smallest_majority_k(p_z: float, target: float, k_max: int) -> Optional[int]:
    """Smallest odd k with majority_phase_error(p_z, k) < target, if any.

    The majority error is monotone nonincreasing in odd k for p_z < 1/2,
    so a binary search over odd values is exact.
    """
    if p_z < target:
        return 1
    if p_z >= 0.5 or majority_phase_error(p_z, k_max if k_max % 2 else k_max - 1) >= target:
        return None
    lo, hi = 0, (k_max - 1) // 2  # k = 2 * index + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if majority_phase_error(p_z, 2 * mid + 1) < target:
            hi = mid
        else:
            lo = mid + 1
    return 2 * lo + 1


def _balanced_k(p_x: float, p_z: float, k_max: int) -> int:
    """Odd k minimizing max(parity bit error, majority phase error)."""
    if p_x >= 0.5 or p_z >= 0.5:
        return 1
    top = (k_max - 1) // 2

    def gap(index: int) -> float:
        k = 2 * index + 1
        return parity_bit_error(p_x, k) - majority_phase_error(p_z, k)

    if gap(0) >= 0.0:
        return 1
    if gap(top) < 0.0:
        return 2 * top + 1
    lo, hi = 0, top
    while lo < hi:
        mid = (lo + hi) // 2
        if gap(mid) >= 0.0:
            hi = mid
        else:
            lo = mid + 1
    candidates = [2 * lo + 1]
    if lo > 0:
        candidates.append(2 * lo - 1)
    def worst(k: int) -> float:
        return max(parity_bit_error(p_x, k), majority_phase_error(p_z, k))
    return min(candidates, key=worst)


def distill_schedule(
    rates: PauliRates,
    target: float = 0.05,
    m_max: int = 60,
    k_max: int = 2001,
) -> DistillationTrace:
    """Search m rejection rounds plus one parity step meeting ``target``.

    Scans m = 0..m_max B-steps followed by a single P-step with odd
    k <= k_max and returns the lexicographically smallest (m, k) whose two
    residual error rates are both strictly below ``target``.  For fixed m
    the parity bit error grows with k while the majority phase error
    shrinks, so the smallest k passing the phase condition is the only
    candidate worth checking.  If no (m, k) within the caps succeeds, the
    best-effort trace (minimal worst residual error) is returned with
    ``succeeded=False``; failure is encoded in the trace, not raised.
    """
    if not 0.0 < target < 0.5:
        raise ValueError(f"target={target!r} outside (0, 0.5)")
    if m_max < 0 or k_max < 1:
        raise ValueError("search caps must be nonnegative")

    outcomes: list[BStepOutcome] = []
    marginals: list[tuple[float, float]] = []
    current = rates
    for m in range(m_max + 1):
        f = flip_rates(current)
        marginals.append((f.p_x, f.p_z))
        k = _smallest_majority_k(f.p_z, target, k_max)
        if k is not None and parity_bit_error(f.p_x, k) < target:
            survival = math.prod(o.survival for o in outcomes[:m])
            result = PStepResult(k, parity_bit_error(f.p_x, k), majority_phase_error(f.p_z, k))
            return DistillationTrace(
                rounds=tuple(outcomes[:m]),
                p_step=result,
                cumulative_survival=survival / k,
                succeeded=True,
            )
        if m < m_max:
            outcome = b_step(current)
            outcomes.append(outcome)
            current = outcome.rates_out

    best: Optional[tuple[float, int, int]] = None
    for m, (p_x, p_z) in enumerate(marginals):
        k = _balanced_k(p_x, p_z, k_max)
        worst = max(parity_bit_error(p_x, k), majority_phase_error(p_z, k))
        if best is None or worst < best[0]:
            best = (worst, m, k)
    assert best is not None
    _, m, k = best
    p_x, p_z = marginals[m]
    survival = math.prod(o.survival for o in outcomes[:m])
    return DistillationTrace(
        rounds=tuple(outcomes[:m]),
        p_step=PStepResult(k, parity_bit_error(p_x, k), majority_phase_error(p_z, k)),
        cumulative_survival=survival / k,
        succeeded=False,
    )


def distillable_in_limit(rates: PauliRates) -> bool:
    """Whether the rejection/parity schedule succeeds for unbounded m and k.

    In the coordinates u = q_i + q_z, v = q_i - q_z, s = q_x + q_y the
    rejection map squares each coordinate and renormalizes by u^2 + s^2.
    After m rounds the bit error is s^(2^m) / (u^(2^m) + s^(2^m)) and the
    phase error sits below 1/2 by (v^(2^m) + t^(2^m)) / 2(u^(2^m)+s^(2^m)).
    A terminal parity step with group size k suppresses the phase error
    when k ~ 1/delta^2 while multiplying the bit error by about k, so some
    (m, k) works exactly when the bit error eventually falls below the
    squared phase margin:

        s < u   and   s * u < v^2.

    This is the m, k -> infinity limit of ``distill_schedule``; it does not
    depend on the residual-error target.
    """
    q_i, q_x, q_y, q_z = rates.as_tuple()
    s = q_x + q_y
    u = q_i + q_z
    v = q_i - q_z
    return s < u and s * u < v * v
