"""Turbo codes (rate-1/3 PCCCs), pseudo-random puncturing to rate 1/2,
analytic error-floor bounds and an AWGN Monte Carlo simulator."""

from .analysis import (
    BoundSummary,
    BudgetError,
    FloorComparison,
    Weight2Spectrum,
    a_m,
    bound_p2,
    bound_p2_from_spectra,
    compare_error_floors,
    oracle_weight2_spectrum,
    parent_bound_summary,
    parent_coefficient,
    parent_dfree_eff,
    prp_bound_summary,
    prp_coefficient,
    prp_dfree_eff,
    punctured_dmin,
    q_function,
    uniform_interleaver_combine,
    zmin,
)
from .codec import (
    Interleaver,
    TurboCodeSpec,
    TurboCodeword,
    encode_pccc,
    random_interleaver,
)
from .decoder import DecodeResult, DecoderInput, log_map, turbo_decode
from .puncture import (
    PuncturingError,
    PuncturingPattern,
    apply_pattern,
    build_prp_pattern,
    depuncture_llr,
    pattern_rate,
)
from .rsc import (
    GeneratorError,
    GeneratorPair,
    RscOutput,
    Trellis,
    build_trellis,
    encode_rsc,
    feedback_period,
    impulse_parity,
    is_primitive,
    parse_generator_pair,
)
from .sim import (
    BerCurvePoint,
    SimConfig,
    awgn,
    bpsk_map,
    channel_llr,
    flag_anomalies,
    noise_variance,
    run_ber,
)

__version__ = "0.1.0"
