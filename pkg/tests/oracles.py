"""Brute-force reference implementations used by several test modules.

These deliberately share no code with the package: the pair-rejection
map is enumerated over all 16 two-qubit error combinations in exact
rational arithmetic, and the parity/majority step over all 2^k error
patterns.  Agreement to 1e-12 is then meaningful evidence.
"""

from fractions import Fraction
from itertools import product

# Per-pauli flags in the computational frame: I, X, Y, Z.
_BIT = (0, 1, 1, 0)
_PHASE = (0, 0, 1, 1)
_INDEX = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}


def enumerate_pair_rejection(rates):
    """Exact pair-rejection update over all 16 error pairs.

    Args:
        rates: (q_i, q_x, q_y, q_z) as Fractions (or ints).

    Returns:
        (rates_out, survival) with rates_out a 4-tuple of Fractions:
        the post-selection distribution of (kept bit flag, XORed phase
        flag), and survival the kept fraction of bits (agreeing pairs
        yield one survivor from two bits).
    """
    rates = tuple(Fraction(q) for q in rates)
    out = [Fraction(0)] * 4
    agree_mass = Fraction(0)
    for i, j in product(range(4), repeat=2):
        weight = rates[i] * rates[j]
        if _BIT[i] != _BIT[j]:
            continue
        agree_mass += weight
        out[_INDEX[(_BIT[i], _PHASE[i] ^ _PHASE[j])]] += weight
    return tuple(q / agree_mass for q in out), agree_mass / 2


def enumerate_parity_bit_error(p, k):
    """P(odd number of flips) over all 2^k patterns, float-exact sum."""
    total = 0.0
    for pattern in product((0, 1), repeat=k):
        weight = 1.0
        for flip in pattern:
            weight *= p if flip else (1.0 - p)
        if sum(pattern) % 2 == 1:
            total += weight
    return total


def enumerate_majority_error(p, k):
    """P(more than half flipped) over all 2^k patterns."""
    total = 0.0
    for pattern in product((0, 1), repeat=k):
        weight = 1.0
        for flip in pattern:
            weight *= p if flip else (1.0 - p)
        if sum(pattern) > k // 2:
            total += weight
    return total
