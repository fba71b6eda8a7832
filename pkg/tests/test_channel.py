import math
import random

import pytest

from asymqkd.channel import (
    Basis,
    BasisMixture,
    PauliRates,
    average_over_mixture,
    conjugate,
    flip_rates,
    key_bit_flip_rates,
)


def random_rates(rng):
    raw = [rng.random() for _ in range(4)]
    total = sum(raw)
    return PauliRates(*(v / total for v in raw))


class TestPauliRates:
    def test_valid_construction(self):
        rates = PauliRates(0.85, 0.10, 0.03, 0.02)
        assert rates.as_tuple() == (0.85, 0.10, 0.03, 0.02)
        assert rates.total_noise == pytest.approx(0.15)

    def test_from_error_rates_infers_identity(self):
        rates = PauliRates.from_error_rates(0.10, 0.0, 0.02)
        assert rates.q_i == pytest.approx(0.88)

    def test_rejects_negative_component(self):
        with pytest.raises(ValueError):
            PauliRates(0.9, -0.1, 0.1, 0.1)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PauliRates(0.5, 0.1, 0.1, 0.1)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            PauliRates(math.nan, 0.0, 0.0, 0.0)

    def test_tiny_negative_is_clipped(self):
        rates = PauliRates(1.0 + 1e-14, -1e-14, 0.0, 0.0)
        assert rates.q_x == 0.0
        assert rates.q_i == pytest.approx(1.0)

    def test_drift_within_tolerance_is_renormalized(self):
        third = 1.0 / 3.0
        rates = PauliRates(third, third, third, 1.0 - 3 * third)
        assert math.isclose(sum(rates.as_tuple()), 1.0, rel_tol=0, abs_tol=1e-15)


def test_flip_rates_pairs_the_right_components():
    flips = flip_rates(PauliRates(0.85, 0.10, 0.03, 0.02))
    assert flips.p_x == pytest.approx(0.13)
    assert flips.p_z == pytest.approx(0.05)
    assert flips.p_y == pytest.approx(0.12)


class TestConjugate:
    def test_z_basis_is_identity(self):
        rates = PauliRates(0.7, 0.1, 0.1, 0.1)
        assert conjugate(rates, Basis.Z) is rates

    def test_x_basis_swaps_x_and_z(self):
        out = conjugate(PauliRates(0.85, 0.10, 0.03, 0.02), Basis.X)
        assert out.as_tuple() == (0.85, 0.02, 0.03, 0.10)

    def test_y_basis_cycles_errors(self):
        out = conjugate(PauliRates(0.85, 0.10, 0.03, 0.02), Basis.Y)
        assert out.as_tuple() == (0.85, 0.02, 0.10, 0.03)

    def test_x_twice_is_identity(self):
        rng = random.Random(7)
        for _ in range(50):
            rates = random_rates(rng)
            twice = conjugate(conjugate(rates, Basis.X), Basis.X)
            assert twice.as_tuple() == pytest.approx(rates.as_tuple(), abs=1e-15)

    def test_y_three_times_is_identity(self):
        rng = random.Random(8)
        for _ in range(50):
            rates = random_rates(rng)
            out = rates
            for _ in range(3):
                out = conjugate(out, Basis.Y)
            assert out.as_tuple() == pytest.approx(rates.as_tuple(), abs=1e-15)

    def test_total_noise_is_preserved(self):
        rng = random.Random(9)
        for basis in Basis:
            for _ in range(20):
                rates = random_rates(rng)
                assert conjugate(rates, basis).total_noise == pytest.approx(
                    rates.total_noise, abs=1e-15
                )

    def test_flip_rates_permute_with_the_frame(self):
        # In the X frame bit and phase errors trade places; in the Y frame
        # the bit error is what the Z frame calls p_y.
        rates = PauliRates(0.6, 0.2, 0.15, 0.05)
        base = flip_rates(rates)
        in_x = flip_rates(conjugate(rates, Basis.X))
        assert (in_x.p_x, in_x.p_z) == pytest.approx((base.p_z, base.p_x))
        in_y = flip_rates(conjugate(rates, Basis.Y))
        assert in_y.p_x == pytest.approx(base.p_y)
        assert in_y.p_z == pytest.approx(base.p_x)


class TestAveraging:
    def test_equal_mixture_formula(self):
        rng = random.Random(10)
        for _ in range(50):
            rates = random_rates(rng)
            avg = average_over_mixture(rates, BasisMixture.equal())
            assert avg.q_i == pytest.approx(rates.q_i, abs=1e-15)
            assert avg.q_x == pytest.approx((rates.q_x + 2 * rates.q_z) / 3, abs=1e-15)
            assert avg.q_y == pytest.approx((rates.q_x + 2 * rates.q_y) / 3, abs=1e-15)
            assert avg.q_z == pytest.approx(
                (rates.q_x + rates.q_y + rates.q_z) / 3, abs=1e-15
            )

    def test_pure_z_mixture_is_identity(self):
        rates = PauliRates(0.85, 0.10, 0.03, 0.02)
        avg = average_over_mixture(rates, BasisMixture(1.0, 0.0, 0.0))
        assert avg.as_tuple() == pytest.approx(rates.as_tuple(), abs=1e-15)

    def test_mixture_validation(self):
        with pytest.raises(ValueError):
            BasisMixture(0.5, 0.5, 0.5)
        with pytest.raises(ValueError):
            BasisMixture(-0.1, 0.6, 0.5)

    def test_two_basis_mixture(self):
        mix = BasisMixture.two_basis(0.7)
        assert (mix.w_z, mix.w_x, mix.w_y) == pytest.approx((0.7, 0.3, 0.0))


def test_key_bit_flip_rates_blends_the_two_bases():
    rates = PauliRates(0.85, 0.10, 0.03, 0.02)
    base = flip_rates(rates)
    all_z = key_bit_flip_rates(rates, 1.0)
    assert (all_z.p_x, all_z.p_z) == pytest.approx((base.p_x, base.p_z))
    all_x = key_bit_flip_rates(rates, 0.0)
    assert (all_x.p_x, all_x.p_z) == pytest.approx((base.p_z, base.p_x))
    half = key_bit_flip_rates(rates, 0.5)
    mid = (base.p_x + base.p_z) / 2
    assert (half.p_x, half.p_z) == pytest.approx((mid, mid))
