"""Key rates, two-way distillation thresholds and a Monte Carlo simulator
for quantum key distribution over asymmetric Pauli channels."""

from .channel import (
    Basis,
    BasisMixture,
    FlipRates,
    PauliRates,
    average_over_mixture,
    conjugate,
    flip_rates,
    key_bit_flip_rates,
)
from .distill import (
    BStepOutcome,
    DistillationTrace,
    PStepParams,
    PStepResult,
    b_step,
    distill_schedule,
    distillable_in_limit,
    majority_phase_error,
    modified_rate_one_bstep,
    p_step,
    parity_bit_error,
)
from .keyrates import (
    binary_entropy,
    clamped,
    rate_bb84_symmetrized,
    rate_single_basis,
    rate_sixstate_mixed,
    rate_sixstate_separate,
    shannon4,
)
from .sim import (
    ComparisonVerdict,
    EveModel,
    ProtocolParams,
    QubitRecord,
    SimReport,
    compare_analytic,
    eve_intercept_resend,
    eve_matched_basis_probe,
    run_protocol,
)
from .threshold import (
    ChannelFamily,
    Fig1Row,
    NonMonotoneFamilyError,
    NoThresholdInRange,
    ProtocolVariant,
    SearchParams,
    ThresholdResult,
    ThresholdSearchError,
    is_distillable,
    sweep_fig1,
    threshold_total_noise,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BasisMixture",
    "BStepOutcome",
    "ChannelFamily",
    "ComparisonVerdict",
    "DistillationTrace",
    "EveModel",
    "Fig1Row",
    "FlipRates",
    "NonMonotoneFamilyError",
    "NoThresholdInRange",
    "PStepParams",
    "PStepResult",
    "PauliRates",
    "ProtocolParams",
    "ProtocolVariant",
    "QubitRecord",
    "SearchParams",
    "SimReport",
    "ThresholdResult",
    "ThresholdSearchError",
    "average_over_mixture",
    "b_step",
    "binary_entropy",
    "clamped",
    "compare_analytic",
    "conjugate",
    "distill_schedule",
    "distillable_in_limit",
    "eve_intercept_resend",
    "eve_matched_basis_probe",
    "flip_rates",
    "is_distillable",
    "key_bit_flip_rates",
    "majority_phase_error",
    "modified_rate_one_bstep",
    "p_step",
    "parity_bit_error",
    "rate_bb84_symmetrized",
    "rate_single_basis",
    "rate_sixstate_mixed",
    "rate_sixstate_separate",
    "run_protocol",
    "shannon4",
    "threshold_total_noise",
]
