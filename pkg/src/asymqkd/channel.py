"""Bell-diagonal Pauli channels and basis-conjugation arithmetic.

A Pauli channel applies one of I, sigma_x, sigma_y, sigma_z to every
transmitted qubit, with fixed probabilities.  A qubit prepared and measured
in the X or Y basis experiences those errors relabelled: conjugating the
error operator by the basis-change unitary permutes the Pauli type, so the
effective error distribution seen by the qubit is a permutation of the
channel's.  Everything downstream (one-way key rates, two-way distillation
maps, the Monte Carlo protocol run) is built on the small set of pure
functions in this module.

Conventions: rate vectors are ordered (q_i, q_x, q_y, q_z).  The bit-flip
rate of a distribution is q_x + q_y, the phase-flip rate q_z + q_y.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

_SUM_TOL = 1e-9
_NEG_TOL = 1e-12


class Basis(enum.Enum):
    """Preparation/measurement basis of a qubit."""

    Z = "Z"
    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class PauliRates:
    """Probabilities of I, X, Y, Z channel errors.

    The four components must be nonnegative and sum to one.  Construction
    renormalizes floating-point drift up to ``1e-9`` in the sum (and clips
    negative round-off down to ``-1e-12``); anything worse is rejected.
    Zero components are fully supported.
    """

    q_i: float
    q_x: float
    q_y: float
    q_z: float

    def __post_init__(self) -> None:
        comps = (self.q_i, self.q_x, self.q_y, self.q_z)
        for name, value in zip(("q_i", "q_x", "q_y", "q_z"), comps):
            value = float(value)
            if not value == value:  # NaN
                raise ValueError(f"{name} is NaN")
            if value < -_NEG_TOL or value > 1.0 + _SUM_TOL:
                raise ValueError(f"{name}={value!r} outside [0, 1]")
        total = sum(comps)
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"Pauli rates sum to {total!r}, not 1")
        clipped = [max(float(c), 0.0) / total for c in comps]
        for name, value in zip(("q_i", "q_x", "q_y", "q_z"), clipped):
            object.__setattr__(self, name, value)

    @classmethod
    def from_error_rates(cls, q_x: float, q_y: float, q_z: float) -> "PauliRates":
        """Build rates from the three error components, inferring q_i."""
        return cls(1.0 - (q_x + q_y + q_z), q_x, q_y, q_z)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.q_i, self.q_x, self.q_y, self.q_z)

    @property
    def total_noise(self) -> float:
        """Total error probability q_x + q_y + q_z."""
        return self.q_x + self.q_y + self.q_z


@dataclass(frozen=True)
class FlipRates:
    """Marginal flip rates (p_x: bit, p_z: phase, p_y: both-conjugate).

    For a distribution q this is (q_x + q_y, q_z + q_y, q_x + q_z): sigma_y
    errors flip both bit and phase, so they enter both marginals.
    """

    p_x: float
    p_z: float
    p_y: float


@dataclass(frozen=True)
class BasisMixture:
    """Weights of Z-, X- and Y-basis preparation, summing to one."""

    w_z: float
    w_x: float
    w_y: float

    def __post_init__(self) -> None:
        weights = (self.w_z, self.w_x, self.w_y)
        if any(w < 0.0 for w in weights):
            raise ValueError(f"mixture weights must be nonnegative, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError(f"mixture weights sum to {sum(weights)!r}, not 1")

    @classmethod
    def equal(cls) -> "BasisMixture":
        """The standard equal three-basis mixture."""
        return cls(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

    @classmethod
    def two_basis(cls, eta: float) -> "BasisMixture":
        """Z/X mixture with Z weight ``eta`` and no Y component."""
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta={eta!r} outside [0, 1]")
        return cls(eta, 1.0 - eta, 0.0)


def flip_rates(rates: PauliRates) -> FlipRates:
    """Marginal bit/phase/conjugate flip rates of a Pauli distribution."""
    return FlipRates(
        p_x=rates.q_x + rates.q_y,
        p_z=rates.q_z + rates.q_y,
        p_y=rates.q_x + rates.q_z,
    )


def conjugate(rates: PauliRates, basis: Basis) -> PauliRates:
    """Error distribution experienced by qubits prepared in ``basis``.

    Z-basis qubits see the channel as-is.  X-basis (Hadamard-rotated)
    qubits see sigma_x and sigma_z exchanged.  Y-basis qubits see a cyclic
    relabelling: a channel sigma_z acts as a bit flip (sigma_x), sigma_x as
    a combined flip (sigma_y) and sigma_y as a phase flip (sigma_z), i.e.
    the effective (q_x, q_y, q_z) is (q_z, q_x, q_y).
    """
    if basis is Basis.Z:
        return rates
    if basis is Basis.X:
        return PauliRates(rates.q_i, rates.q_z, rates.q_y, rates.q_x)
    if basis is Basis.Y:
        return PauliRates(rates.q_i, rates.q_z, rates.q_x, rates.q_y)
    raise ValueError(f"unknown basis {basis!r}")


def average_over_mixture(rates: PauliRates, mixture: BasisMixture) -> PauliRates:
    """Effective distribution for a random mixture of preparation bases.

    When key bits are drawn from several bases with the given weights, the
    averaged error distribution is the weight-sum of the per-basis
    conjugated distributions.  With equal weights this collapses a channel
    (1-2q, q, 0, q) to (1-2q, q, q/3, 2q/3), i.e. averaging moves weight
    into the q_y component even when the channel itself has none.
    """
    parts = (
        (mixture.w_z, conjugate(rates, Basis.Z)),
        (mixture.w_x, conjugate(rates, Basis.X)),
        (mixture.w_y, conjugate(rates, Basis.Y)),
    )
    acc = [0.0, 0.0, 0.0, 0.0]
    for weight, part in parts:
        for i, component in enumerate(part.as_tuple()):
            acc[i] += weight * component
    return PauliRates(*acc)


def key_bit_flip_rates(rates: PauliRates, eta: float) -> FlipRates:
    """Flip rates of key bits drawn from a Z/X mixture with Z weight eta.

    Mixing the two bases blends the bit- and phase-flip rates into each
    other; the combined-flip component is basis-symmetric and unchanged.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta!r} outside [0, 1]")
    base = flip_rates(rates)
    return FlipRates(
        p_x=eta * base.p_x + (1.0 - eta) * base.p_z,
        p_z=eta * base.p_z + (1.0 - eta) * base.p_x,
        p_y=base.p_y,
    )
