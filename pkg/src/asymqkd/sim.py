"""Seeded Monte Carlo run of the prepare-and-measure protocol.

The protocol transmits (6 + delta) * n qubits, sources them from the
three bases with weights (1/4, 1/4, 1/2) favouring Y, sifts on matching
measurement bases, keeps n Y-basis bits as key and n mixed-basis bits as
checks, then applies pair-rejection rounds and one parity step to the key.
The simulation is stochastic-exact for Pauli channels and intercept-resend
attacks on mutually unbiased states, so no state vectors are involved:

* a Pauli error on a basis eigenstate either flips the measured bit or
  not, according to the basis-conjugated error type;
* any eigenstate measured in a different basis yields a uniform bit.

Phase-flip flags of the key bits are book-kept in the Y frame alongside
the bit flags: rejection XORs the pair's phase flags onto the survivor,
the parity step majority-decodes them.  A bit re-prepared by an
eavesdropper in a foreign basis carries no Y-frame phase correlation, so
its phase flag is scrambled uniformly.

Randomness: one ``numpy`` PCG64 generator per named stage, spawned from
``SeedSequence(seed)`` in a fixed order (see ``_STREAMS``).  Within a
stage, the i-th transmitted qubit consumes the i-th variate, so serial
runs and any positional-parallel split agree bit for bit.  Identical
(channel, params, seed, eve) inputs reproduce the report exactly.

Aborts (too few sifted bits, short check pools, failed error test, key
exhaustion) are outcomes, not errors: the report carries the abort reason
and whatever comparison rows were computed before the abort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import Basis, FlipRates, PauliRates, conjugate, flip_rates
from .distill import PStepParams, b_step, p_step
from .keyrates import binary_entropy

_BASIS_ORDER = (Basis.Z, Basis.X, Basis.Y)
_BASIS_CODE = {basis: code for code, basis in enumerate(_BASIS_ORDER)}
_PAULI_NAMES = ("I", "X", "Y", "Z")
_STREAMS = (
    "alice_bits",
    "alice_bases",
    "eve_bases",
    "eve_bits",
    "channel_paulis",
    "bob_bases",
    "bob_scramble",
    "phase_scramble",
    "selection",
    "pairing",
    "grouping",
)


def _flag_tables() -> tuple[np.ndarray, np.ndarray]:
    """(bit, phase) flip flags of each Pauli as seen from each basis.

    Derived from ``conjugate`` on one-hot distributions so the simulator
    and the analytic layer cannot drift apart.
    """
    bit = np.zeros((3, 4), dtype=np.uint8)
    phase = np.zeros((3, 4), dtype=np.uint8)
    for b_code, basis in enumerate(_BASIS_ORDER):
        for p_code in range(4):
            one_hot = [0.0, 0.0, 0.0, 0.0]
            one_hot[p_code] = 1.0
            eff = conjugate(PauliRates(*one_hot), basis).as_tuple()
            eff_code = max(range(4), key=eff.__getitem__)
            bit[b_code, p_code] = 1 if eff_code in (1, 2) else 0
            phase[b_code, p_code] = 1 if eff_code in (2, 3) else 0
    return bit, phase


_BIT_FLAG, _PHASE_FLAG = _flag_tables()


@dataclass(frozen=True)
class ProtocolParams:
    """Run configuration; defaults follow the protocol as stated."""

    n: int
    delta: float = 2.0
    source_probs: tuple[float, float, float] = (0.25, 0.25, 0.5)
    bob_probs: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    b_rounds: int = 2
    p_group: int = 3
    target: float = 0.05
    abort_sigma: float = 3.0
    abort_ceiling: float = 0.45
    # Z/X/Y composition of the n check bits.  The default matches what a
    # uniform draw from the post-key remainder produces in expectation at
    # delta = 2 (pools 2n/3, 2n/3, n/3), leaving every basis the same
    # safety margin; an exact-thirds split would consume the whole
    # expected Y remainder and abort on half of all seeds.
    check_split: tuple[float, float, float] = (0.4, 0.4, 0.2)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        for name in ("source_probs", "bob_probs", "check_split"):
            probs = getattr(self, name)
            if len(probs) != 3 or any(p < 0.0 for p in probs):
                raise ValueError(f"{name} must be three nonnegative weights, got {probs}")
            if abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError(f"{name} sums to {sum(probs)!r}, not 1")
        if self.b_rounds < 0:
            raise ValueError(f"b_rounds must be >= 0, got {self.b_rounds}")
        PStepParams(self.p_group)
        if not 0.0 < self.target < 0.5:
            raise ValueError(f"target={self.target!r} outside (0, 0.5)")
        if self.abort_sigma <= 0.0:
            raise ValueError(f"abort_sigma must be positive, got {self.abort_sigma}")
        if not 0.0 < self.abort_ceiling < 1.0:
            raise ValueError(f"abort_ceiling={self.abort_ceiling!r} outside (0, 1)")


@dataclass(frozen=True)
class EveModel:
    """Intercept-resend attacker: measure in a random basis, resend the outcome.

    ``match_prep`` is a diagnostic mode where she always measures in the
    qubit's own preparation basis; faithful resending then induces no
    error at all, which pins down the simulator's attack plumbing.
    """

    bases: tuple[Basis, ...] = ()
    weights: tuple[float, ...] = ()
    match_prep: bool = False

    def describe(self) -> str:
        if self.match_prep:
            return "match-prep-probe"
        names = ",".join(b.value for b in self.bases)
        weights = ",".join(repr(w) for w in self.weights)
        return f"bases={names};weights={weights}"


def eve_intercept_resend(
    bases: tuple[Basis, ...],
    weights: Optional[tuple[float, ...]] = None,
) -> EveModel:
    """Attacker measuring in one of ``bases``, uniform unless weighted."""
    if not bases:
        raise ValueError("eavesdropper needs at least one basis")
    if weights is None:
        weights = tuple(1.0 / len(bases) for _ in bases)
    if len(weights) != len(bases) or any(w < 0.0 for w in weights):
        raise ValueError(f"bad attack weights {weights}")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError(f"attack weights sum to {sum(weights)!r}, not 1")
    return EveModel(bases=tuple(bases), weights=tuple(weights))


def eve_matched_basis_probe() -> EveModel:
    return EveModel(match_prep=True)


@dataclass(frozen=True)
class QubitRecord:
    """Per-qubit journal entry (collected only on request, for small runs)."""

    prep_basis: Basis
    prep_bit: int
    pauli_applied: str
    eve_action: Optional[tuple[Basis, int]]
    meas_basis: Basis
    meas_bit: int
    sifted: bool
    role: str  # "key" | "check" | "discarded"


@dataclass(frozen=True)
class ComparisonRow:
    """One empirical quantity next to its analytic prediction."""

    stage: str
    quantity: str
    count: int
    empirical: float
    analytic: float
    std_error: float


@dataclass(frozen=True)
class StageCount:
    """Bit bookkeeping for one stage: kept + discarded = entering."""

    stage: str
    n_in: int
    n_kept: int
    n_discarded: int


@dataclass(frozen=True)
class SimReport:
    """Everything a run produced; serializes to flat text and to CSV."""

    seed: int
    channel: PauliRates
    params: ProtocolParams
    eve: str
    n_transmitted: int
    n_sifted: int
    sifted_by_basis: tuple[int, int, int]
    aborted: bool
    abort_reason: Optional[str]
    rows: tuple[ComparisonRow, ...]
    stage_counts: tuple[StageCount, ...]
    final_bit_error: Optional[float] = None
    final_phase_error: Optional[float] = None
    final_rate_empirical: Optional[float] = None
    final_rate_analytic: Optional[float] = None
    goal_met: Optional[bool] = None
    qubits: Optional[tuple[QubitRecord, ...]] = field(default=None, repr=False)

    def _scalars(self) -> list[tuple[str, str]]:
        p = self.params
        items = [
            ("schema", "asymqkd.simreport.v1"),
            ("seed", repr(self.seed)),
            ("channel.q_i", repr(self.channel.q_i)),
            ("channel.q_x", repr(self.channel.q_x)),
            ("channel.q_y", repr(self.channel.q_y)),
            ("channel.q_z", repr(self.channel.q_z)),
            ("params.n", repr(p.n)),
            ("params.delta", repr(p.delta)),
            ("params.source_probs", ",".join(repr(x) for x in p.source_probs)),
            ("params.bob_probs", ",".join(repr(x) for x in p.bob_probs)),
            ("params.b_rounds", repr(p.b_rounds)),
            ("params.p_group", repr(p.p_group)),
            ("params.target", repr(p.target)),
            ("params.abort_sigma", repr(p.abort_sigma)),
            ("params.abort_ceiling", repr(p.abort_ceiling)),
            ("params.check_split", ",".join(repr(x) for x in p.check_split)),
            ("eve", self.eve),
            ("n_transmitted", repr(self.n_transmitted)),
            ("n_sifted", repr(self.n_sifted)),
            ("sifted.Z", repr(self.sifted_by_basis[0])),
            ("sifted.X", repr(self.sifted_by_basis[1])),
            ("sifted.Y", repr(self.sifted_by_basis[2])),
            ("aborted", "true" if self.aborted else "false"),
            ("abort_reason", self.abort_reason or ""),
        ]
        for name, value in (
            ("final_bit_error", self.final_bit_error),
            ("final_phase_error", self.final_phase_error),
            ("final_rate_empirical", self.final_rate_empirical),
            ("final_rate_analytic", self.final_rate_analytic),
        ):
            if value is not None:
                items.append((name, repr(value)))
        if self.goal_met is not None:
            items.append(("goal_met", "true" if self.goal_met else "false"))
        for sc in self.stage_counts:
            items.append((f"stage.{sc.stage}", f"in={sc.n_in};kept={sc.n_kept};discarded={sc.n_discarded}"))
        return items

    def to_text(self) -> str:
        """Flat ``key = value`` rendering, one line per scalar and row field."""
        lines = [f"{key} = {value}" for key, value in self._scalars()]
        for row in self.rows:
            prefix = f"row.{row.stage}.{row.quantity}"
            lines.append(f"{prefix}.count = {row.count}")
            lines.append(f"{prefix}.empirical = {row.empirical!r}")
            lines.append(f"{prefix}.analytic = {row.analytic!r}")
            lines.append(f"{prefix}.std_error = {row.std_error!r}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        """CSV with ``#`` header lines (schema, config, seed) then one row per stage."""
        lines = [f"# {key}: {value}" for key, value in self._scalars()]
        lines.append("stage,quantity,count,empirical,analytic,std_error")
        for row in self.rows:
            lines.append(
                f"{row.stage},{row.quantity},{row.count},"
                f"{row.empirical!r},{row.analytic!r},{row.std_error!r}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VerdictRow:
    stage: str
    quantity: str
    empirical: float
    analytic: float
    z: float
    ok: bool


@dataclass(frozen=True)
class ComparisonVerdict:
    rows: tuple[VerdictRow, ...]
    z_limit: float

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)

    def to_text(self) -> str:
        lines = [f"{'stage':<16} {'quantity':<16} {'empirical':>12} {'analytic':>12} {'z':>8}  verdict"]
        for r in self.rows:
            lines.append(
                f"{r.stage:<16} {r.quantity:<16} {r.empirical:>12.6g} "
                f"{r.analytic:>12.6g} {r.z:>8.2f}  {'ok' if r.ok else 'FAIL'}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} (|z| <= {self.z_limit:g})")
        return "\n".join(lines) + "\n"


def compare_analytic(report: SimReport, z_limit: float = 3.0) -> ComparisonVerdict:
    """Score every comparison row of a report by its z-value.

    A row passes when |empirical - analytic| <= z_limit * std_error; a zero
    standard error demands exact agreement.  The verdict is PASS only if
    every row passes, so a corrupted analytic table cannot slip through.
    """
    rows = []
    for row in report.rows:
        diff = row.empirical - row.analytic
        if row.std_error > 0.0:
            z = diff / row.std_error
        else:
            z = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        rows.append(
            VerdictRow(row.stage, row.quantity, row.empirical, row.analytic, z, abs(z) <= z_limit)
        )
    return ComparisonVerdict(rows=tuple(rows), z_limit=z_limit)


def _sample_categorical(rng: np.random.Generator, probs, size: int) -> np.ndarray:
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size), side="right").astype(np.uint8)


def _rate_row(stage: str, quantity: str, count: int, empirical: float, analytic: float) -> ComparisonRow:
    std = math.sqrt(analytic * (1.0 - analytic) / count) if count > 0 else 0.0
    return ComparisonRow(stage, quantity, count, empirical, analytic, std)


def _split_counts(n: int, fractions) -> tuple[int, int, int]:
    counts = [int(math.floor(n * f)) for f in fractions]
    remainder = n - sum(counts)
    for i in range(remainder):
        counts[i % 3] += 1
    return tuple(counts)


def run_protocol(
    channel: PauliRates,
    params: ProtocolParams,
    seed: int,
    eve: Optional[EveModel] = None,
    collect_qubits: bool = False,
) -> SimReport:
    """Simulate one full protocol run and compare it with the analytics.

    Args:
        channel: Pauli error distribution of the quantum channel.
        params: transmission sizes, basis weights and post-processing knobs.
        seed: root seed of the per-stage random streams.
        eve: optional intercept-resend attacker applied before the channel.
        collect_qubits: attach per-qubit records (memory heavy; small runs).

    Returns:
        A ``SimReport``; aborts are reported, never raised.
    """
    n = params.n
    n_total = int(math.ceil((6.0 + params.delta) * n))
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    rng = {name: np.random.default_rng(child) for name, child in zip(_STREAMS, children)}

    alice_bits = rng["alice_bits"].integers(0, 2, n_total, dtype=np.uint8)
    alice_basis = _sample_categorical(rng["alice_bases"], params.source_probs, n_total)
    state_basis = alice_basis.copy()
    state_bit = alice_bits.copy()

    eve_basis = None
    if eve is not None:
        if eve.match_prep:
            eve_basis = alice_basis.copy()
        else:
            codes = np.array([_BASIS_CODE[b] for b in eve.bases], dtype=np.uint8)
            picks = _sample_categorical(rng["eve_bases"], eve.weights, n_total)
            eve_basis = codes[picks]
            eve_bits = rng["eve_bits"].integers(0, 2, n_total, dtype=np.uint8)
            rebased = eve_basis != state_basis
            state_basis[rebased] = eve_basis[rebased]
            state_bit[rebased] = eve_bits[rebased]

    paulis = _sample_categorical(rng["channel_paulis"], channel.as_tuple(), n_total)
    bob_basis = _sample_categorical(rng["bob_bases"], params.bob_probs, n_total)
    bit_flip = _BIT_FLAG[state_basis, paulis]
    scramble = rng["bob_scramble"].integers(0, 2, n_total, dtype=np.uint8)
    basis_match = bob_basis == state_basis
    meas_bit = np.where(basis_match, state_bit ^ bit_flip, scramble).astype(np.uint8)

    # Y-frame phase flags for eventual key bits; foreign-basis re-preparation
    # destroys the conjugate correlation, hence the uniform scramble.
    phase_flag = _PHASE_FLAG[state_basis, paulis]
    phase_noise = rng["phase_scramble"].integers(0, 2, n_total, dtype=np.uint8)
    phase_flag = np.where(state_basis == alice_basis, phase_flag, phase_noise)

    sifted = bob_basis == alice_basis
    errors = (meas_bit ^ alice_bits).astype(np.uint8)
    n_sifted = int(sifted.sum())
    sifted_by_basis = tuple(int(((alice_basis == c) & sifted).sum()) for c in range(3))

    p_sift = sum(s * b for s, b in zip(params.source_probs, params.bob_probs))
    rows = [_rate_row("sift", "sifted_fraction", n_total, n_sifted / n_total, p_sift)]
    stage_counts = [StageCount("sift", n_total, n_sifted, n_total - n_sifted)]
    role = np.zeros(n_total, dtype=np.uint8)  # 0 discarded, 1 check, 2 key

    def finish(abort_reason: Optional[str], extra: dict) -> SimReport:
        qubits = None
        if collect_qubits:
            records = []
            for i in range(n_total):
                action = None
                if eve_basis is not None:
                    action = (_BASIS_ORDER[eve_basis[i]], int(state_bit[i]))
                records.append(
                    QubitRecord(
                        prep_basis=_BASIS_ORDER[alice_basis[i]],
                        prep_bit=int(alice_bits[i]),
                        pauli_applied=_PAULI_NAMES[paulis[i]],
                        eve_action=action,
                        meas_basis=_BASIS_ORDER[bob_basis[i]],
                        meas_bit=int(meas_bit[i]),
                        sifted=bool(sifted[i]),
                        role=("discarded", "check", "key")[role[i]],
                    )
                )
            qubits = tuple(records)
        return SimReport(
            seed=seed,
            channel=channel,
            params=params,
            eve=eve.describe() if eve is not None else "none",
            n_transmitted=n_total,
            n_sifted=n_sifted,
            sifted_by_basis=sifted_by_basis,
            aborted=abort_reason is not None,
            abort_reason=abort_reason,
            rows=tuple(rows),
            stage_counts=tuple(stage_counts),
            qubits=qubits,
            **extra,
        )

    if n_sifted < 2 * n:
        return finish(f"insufficient sifted bits ({n_sifted} < {2 * n})", {})

    sel = rng["selection"]
    y_pool = np.flatnonzero(sifted & (alice_basis == 2))
    if y_pool.size < n:
        return finish(f"insufficient Y-basis sifted bits ({y_pool.size} < {n})", {})
    key_idx = np.sort(sel.permutation(y_pool)[:n])
    role[key_idx] = 2

    check_counts = _split_counts(n, params.check_split)
    check_idx = {}
    for code, want in enumerate(check_counts):
        pool = np.flatnonzero(sifted & (alice_basis == code) & (role == 0))
        if pool.size < want:
            basis_name = _BASIS_ORDER[code].value
            return finish(
                f"insufficient {basis_name}-basis check bits ({pool.size} < {want})", {}
            )
        chosen = np.sort(sel.permutation(pool)[:want])
        check_idx[code] = chosen
        role[chosen] = 1
    n_roles = n + sum(check_counts)
    stage_counts.append(StageCount("roles", n_sifted, n_roles, n_sifted - n_roles))

    abort_reason = None
    for code, idx in check_idx.items():
        if idx.size == 0:
            continue
        basis = _BASIS_ORDER[code]
        expected = flip_rates(conjugate(channel, basis)).p_x
        observed = float(errors[idx].mean())
        row = _rate_row(f"check:{basis.value}", "bit_error", idx.size, observed, expected)
        rows.append(row)
        excess = observed - expected
        if abort_reason is None and (
            excess > params.abort_sigma * row.std_error or observed > params.abort_ceiling
        ):
            abort_reason = (
                f"check error in basis {basis.value}: {observed:.6g} vs expected {expected:.6g}"
            )
    if abort_reason is not None:
        return finish(abort_reason, {})

    key_bits = errors[key_idx].copy()
    key_phase = phase_flag[key_idx].copy()
    rates_now = conjugate(channel, Basis.Y)
    f_now = flip_rates(rates_now)
    rows.append(_rate_row("key:transmit", "bit_error", n, float(key_bits.mean()), f_now.p_x))
    rows.append(_rate_row("key:transmit", "phase_error", n, float(key_phase.mean()), f_now.p_z))

    pair_rng = rng["pairing"]
    for round_no in range(1, params.b_rounds + 1):
        stage = f"key:reject_{round_no}"
        length = key_bits.size
        pairs = length // 2
        if pairs == 0:
            return finish(f"key exhausted before rejection round {round_no}", {})
        order = pair_rng.permutation(length)[: 2 * pairs].reshape(pairs, 2)
        left, right = order[:, 0], order[:, 1]
        agree = key_bits[left] == key_bits[right]
        survivors = int(agree.sum())
        outcome = b_step(rates_now)
        expected_surv = pairs * 2.0 * outcome.survival  # pair agreement probability
        std_surv = math.sqrt(pairs * 2.0 * outcome.survival * (1.0 - 2.0 * outcome.survival))
        rows.append(
            ComparisonRow(stage, "survivors", pairs, float(survivors), expected_surv, std_surv)
        )
        stage_counts.append(StageCount(stage, length, survivors, length - survivors))
        if survivors == 0:
            return finish(f"no key bits survived rejection round {round_no}", {})
        key_bits = key_bits[left][agree]
        key_phase = (key_phase[left] ^ key_phase[right])[agree]
        rates_now = outcome.rates_out
        f_now = flip_rates(rates_now)
        rows.append(_rate_row(stage, "bit_error", survivors, float(key_bits.mean()), f_now.p_x))
        rows.append(_rate_row(stage, "phase_error", survivors, float(key_phase.mean()), f_now.p_z))

    k = params.p_group
    length = key_bits.size
    groups = length // k
    if groups == 0:
        return finish("key exhausted before parity step", {})
    order = rng["grouping"].permutation(length)[: groups * k].reshape(groups, k)
    group_bits = key_bits[order].sum(axis=1) % 2
    group_phase = (key_phase[order].sum(axis=1) > k // 2).astype(np.uint8)
    predicted = p_step(f_now, PStepParams(k))
    rows.append(_rate_row("key:parity", "bit_error", groups, float(group_bits.mean()), predicted.p_x))
    rows.append(
        _rate_row("key:parity", "phase_error", groups, float(group_phase.mean()), predicted.p_z)
    )
    stage_counts.append(StageCount("key:parity", length, groups, length - groups))

    bit_err = float(group_bits.mean())
    phase_err = float(group_phase.mean())
    extra = {
        "final_bit_error": bit_err,
        "final_phase_error": phase_err,
        "final_rate_empirical": 1.0 - binary_entropy(bit_err) - binary_entropy(phase_err),
        "final_rate_analytic": 1.0 - binary_entropy(predicted.p_x) - binary_entropy(predicted.p_z),
        "goal_met": bit_err < params.target and phase_err < params.target,
    }
    return finish(None, extra)
