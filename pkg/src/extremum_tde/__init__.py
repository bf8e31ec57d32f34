"""Joint compression and time-delay estimation via extremum encoding.

The encoder compresses its window of complex baseband samples to the
k-bit index of the maximum-magnitude sample; the decoder estimates the
integer delay by searching the magnitudes around that index.  The
package bundles the signal model, the codec, the estimators and their
benchmark baselines, closed-form error bounds, a reproducible Monte
Carlo harness, and a CLI.
"""

__version__ = "0.1.0"

from .estimators import (
    DelayEstimate,
    EstimatorId,
    cce,
    forward_test_channel,
    mmie_decode,
    one_bit_quantize,
    rd_compress,
    rho_sq_mmie,
    rho_sq_profile,
)
from .extremum_codec import Message, encode_max_index, pack, unpack
from .montecarlo import (
    ErrorRateEstimate,
    ExperimentConfig,
    SweepPoint,
    fit_constant,
    run_experiment,
    run_trial,
    sweep_k,
    sweep_snr,
    wilson_interval,
)
from .signal_model import (
    ModelParams,
    ObservationPair,
    RawSensorParams,
    ccn_samples,
    effective_rho,
    generate_pair,
    generate_raw_pair,
    rho_from_snr,
)
from .theory import (
    BoundReport,
    EpsilonMode,
    EULER_GAMMA,
    error_exponent,
    evaluate_bounds,
    extremum_cdf_exact,
    extremum_cdf_limit,
    harmonic_asymptotic,
    harmonic_moments,
    harmonic_number,
    lower_bound,
    truncated_tail_bound_check,
    upper_bound,
)

__all__ = [
    "__version__",
    "BoundReport",
    "DelayEstimate",
    "EpsilonMode",
    "ErrorRateEstimate",
    "EstimatorId",
    "EULER_GAMMA",
    "ExperimentConfig",
    "Message",
    "ModelParams",
    "ObservationPair",
    "RawSensorParams",
    "SweepPoint",
    "cce",
    "ccn_samples",
    "effective_rho",
    "encode_max_index",
    "error_exponent",
    "evaluate_bounds",
    "extremum_cdf_exact",
    "extremum_cdf_limit",
    "fit_constant",
    "forward_test_channel",
    "generate_pair",
    "generate_raw_pair",
    "harmonic_asymptotic",
    "harmonic_moments",
    "harmonic_number",
    "lower_bound",
    "mmie_decode",
    "one_bit_quantize",
    "pack",
    "rd_compress",
    "rho_from_snr",
    "rho_sq_mmie",
    "rho_sq_profile",
    "run_experiment",
    "run_trial",
    "sweep_k",
    "sweep_snr",
    "truncated_tail_bound_check",
    "unpack",
    "upper_bound",
    "wilson_interval",
]
