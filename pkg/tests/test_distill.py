import math
import random
from fractions import Fraction

import pytest

from asymqkd.channel import FlipRates, PauliRates, flip_rates
from asymqkd.distill import (
    PStepParams,
    b_step,
    distill_schedule,
    distillable_in_limit,
    majority_phase_error,
    modified_rate_one_bstep,
    p_step,
    parity_bit_error,
)
from asymqkd.keyrates import shannon4

from oracles import (
    enumerate_majority_error,
    enumerate_pair_rejection,
    enumerate_parity_bit_error,
)

# Symmetric-channel feasibility boundary of unbounded pair rejection plus
# parity: 3*(5 - sqrt(5))/20, from scripts/derive_golden.py.
SYMMETRIC_LIMIT = 0.41458980337503155


def random_fraction_rates(rng):
    while True:
        raw = [rng.randrange(0, 1000) for _ in range(4)]
        if sum(raw) > 0 and raw[0] + raw[3] > 0:
            break
    total = sum(raw)
    return tuple(Fraction(v, total) for v in raw)


class TestBStep:
    def test_matches_exhaustive_pair_enumeration(self):
        rng = random.Random(42)
        for _ in range(100):
            exact = random_fraction_rates(rng)
            expected, survival = enumerate_pair_rejection(exact)
            outcome = b_step(PauliRates(*(float(q) for q in exact)))
            for got, want in zip(outcome.rates_out.as_tuple(), expected):
                assert got == pytest.approx(float(want), abs=1e-12)
            assert outcome.survival == pytest.approx(float(survival), abs=1e-12)

    def test_fully_mixed_channel_survival_is_one_quarter(self):
        outcome = b_step(PauliRates(0.25, 0.25, 0.25, 0.25))
        assert outcome.survival == pytest.approx(0.25, abs=1e-15)
        assert outcome.rates_out.as_tuple() == pytest.approx((0.25,) * 4, abs=1e-15)

    def test_pure_bit_flip_example(self):
        outcome = b_step(PauliRates(0.9, 0.1, 0.0, 0.0))
        assert outcome.rates_out.q_i == pytest.approx(0.81 / 0.82, abs=1e-15)
        assert outcome.rates_out.q_x == pytest.approx(0.01 / 0.82, abs=1e-15)
        assert outcome.rates_out.q_y == 0.0
        assert outcome.rates_out.q_z == 0.0
        assert outcome.survival == pytest.approx(0.41, abs=1e-15)

    def test_noiseless_is_a_fixed_point_with_half_survival(self):
        outcome = b_step(PauliRates(1.0, 0.0, 0.0, 0.0))
        assert outcome.rates_out.as_tuple() == (1.0, 0.0, 0.0, 0.0)
        assert outcome.survival == 0.5

    def test_bit_error_strictly_decreases(self):
        rng = random.Random(43)
        for _ in range(50):
            raw = [rng.random() for _ in range(4)]
            total = sum(raw) * 1.3  # leave decent identity weight
            rates = PauliRates(
                1.0 - (raw[1] + raw[2] + raw[3]) / total,
                raw[1] / total,
                raw[2] / total,
                raw[3] / total,
            )
            before = flip_rates(rates).p_x
            after = flip_rates(b_step(rates).rates_out).p_x
            if 0.0 < before < 0.5:
                assert after < before


class TestPStep:
    @pytest.mark.parametrize("k", [1, 3, 5, 7])
    def test_matches_pattern_enumeration(self, k):
        rng = random.Random(k)
        for _ in range(25):
            p_x, p_z = rng.random(), rng.random()
            result = p_step(FlipRates(p_x, p_z, float("nan")), PStepParams(k))
            assert result.p_x == pytest.approx(
                enumerate_parity_bit_error(p_x, k), abs=1e-12
            )
            assert result.p_z == pytest.approx(
                enumerate_majority_error(p_z, k), abs=1e-12
            )

    def test_k_one_is_identity(self):
        result = p_step(FlipRates(0.12, 0.34, float("nan")), PStepParams(1))
        assert (result.p_x, result.p_z) == pytest.approx((0.12, 0.34))

    def test_even_k_rejected(self):
        with pytest.raises(ValueError):
            PStepParams(4)

    def test_nonpositive_k_rejected(self):
        with pytest.raises(ValueError):
            PStepParams(-3)

    def test_flip_rates_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            p_step(FlipRates(1.2, 0.1, float("nan")), PStepParams(3))

    def test_majority_error_decreases_with_k_below_half(self):
        for p_z in (0.05, 0.2, 0.4):
            values = [majority_phase_error(p_z, k) for k in (1, 3, 5, 7, 9)]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_majority_edge_cases(self):
        assert majority_phase_error(0.0, 5) == 0.0
        assert majority_phase_error(1.0, 5) == 1.0
        assert majority_phase_error(0.5, 7) == pytest.approx(0.5, abs=1e-12)

    def test_parity_error_spot_value(self):
        # 1 - (1 - 2*0.01)^3 all over 2
        assert parity_bit_error(0.01, 3) == pytest.approx(0.029404, abs=1e-9)


class TestModifiedRate:
    def test_noiseless_pays_only_the_rejection_half(self):
        assert modified_rate_one_bstep(PauliRates(1.0, 0.0, 0.0, 0.0)) == pytest.approx(0.5)

    def test_definition_holds_on_random_channels(self):
        rng = random.Random(44)
        for _ in range(50):
            raw = [rng.random() + 0.5, rng.random() / 4, rng.random() / 4, rng.random() / 4]
            total = sum(raw)
            rates = PauliRates(*(v / total for v in raw))
            outcome = b_step(rates)
            expected = outcome.survival * (1.0 - shannon4(outcome.rates_out))
            assert modified_rate_one_bstep(rates) == pytest.approx(expected, abs=1e-13)


class TestDistillSchedule:
    def test_noiseless_needs_no_work(self):
        trace = distill_schedule(PauliRates(1.0, 0.0, 0.0, 0.0))
        assert trace.succeeded
        assert trace.rounds == ()
        assert trace.p_step.k == 1
        assert trace.cumulative_survival == 1.0

    def test_moderate_noise_succeeds(self):
        trace = distill_schedule(PauliRates.from_error_rates(0.10, 0.0, 0.10))
        assert trace.succeeded
        bit, phase = trace.final_errors
        assert bit < 0.05
        assert phase < 0.05

    def test_cumulative_survival_is_the_product_over_rounds(self):
        trace = distill_schedule(PauliRates.from_error_rates(0.12, 0.01, 0.08))
        expected = 1.0
        for outcome in trace.rounds:
            expected *= outcome.survival
        expected /= trace.p_step.k
        assert trace.cumulative_survival == pytest.approx(expected, rel=1e-12)

    def test_hopeless_channel_reports_failure_with_best_effort(self):
        trace = distill_schedule(
            PauliRates(0.25, 0.25, 0.25, 0.25), m_max=6, k_max=31
        )
        assert not trace.succeeded
        bit, phase = trace.final_errors
        assert 0.0 <= bit <= 1.0
        assert 0.0 <= phase <= 1.0
        assert max(bit, phase) >= 0.05

    def test_target_validation(self):
        with pytest.raises(ValueError):
            distill_schedule(PauliRates(1.0, 0.0, 0.0, 0.0), target=0.7)


class TestLimitCriterion:
    def test_symmetric_boundary(self):
        for total, expected in (
            (SYMMETRIC_LIMIT - 1e-6, True),
            (SYMMETRIC_LIMIT + 1e-6, False),
        ):
            third = total / 3.0
            rates = PauliRates.from_error_rates(third, third, third)
            assert distillable_in_limit(rates) is expected

    def test_pure_phase_noise_is_always_distillable(self):
        assert distillable_in_limit(PauliRates(0.6, 0.0, 0.0, 0.4))

    def test_balanced_identity_and_phase_is_not(self):
        # p_z = 1/2 exactly: majority voting has nothing to bite on.
        assert not distillable_in_limit(PauliRates(0.5, 0.0, 0.0, 0.5))

    def test_fully_mixed_is_not(self):
        assert not distillable_in_limit(PauliRates(0.25, 0.25, 0.25, 0.25))

    def test_agrees_with_finite_search_where_search_succeeds(self):
        rng = random.Random(45)
        for _ in range(25):
            scale = rng.uniform(0.0, 0.3)
            raw = [rng.random() for _ in range(3)]
            total = sum(raw)
            rates = PauliRates.from_error_rates(
                *(scale * v / total for v in raw)
            )
            if distill_schedule(rates).succeeded:
                assert distillable_in_limit(rates)
