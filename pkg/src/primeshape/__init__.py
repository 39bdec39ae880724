"""Probabilistic shaping toolkit for prime-field constellations.

Covers exact symbol-sum distributions over F_p, Maxwell-Boltzmann
shaping of ASK and circular-QAM alphabets, constant-composition
distribution matching, AWGN mutual-information evaluation, SNR-gap
optimization, and systematic shaping chains.
"""

__version__ = "0.1.0"

from .awgn_mi import (
    ChannelSnr,
    capacity_gamma,
    mi_complex_cqam,
    mi_complex_naive,
    mi_real,
)
from .constellations import (
    Constellation,
    CqamParams,
    ShellStructure,
    Stretch,
    build_ask,
    build_cqam,
    build_cqam_stretched,
    figure_of_merit,
    min_distance,
)
from .field import FpSymbol, Prime, add, ask_point, ask_symbol, is_prime
from .optimizer import (
    ShapingSolution,
    compute_table,
    emit_table,
    optimize_cqam,
    optimize_shaped_ask,
    optimize_time_sharing,
    snr_for_rate,
)
from .pas import (
    CodeSpec,
    PasFrame,
    empirical_distributions,
    encode,
    generate_frames,
    map_frame,
)
from .shaping import (
    CompositionPlan,
    MaxwellBoltzmann,
    ask_energy,
    ccdm_decode,
    ccdm_encode,
    cqam_prior,
    mb_ask_prior,
)
from .sumdist import (
    SymbolDistribution,
    sum_distribution_convolve,
    sum_distribution_dft,
    uniformity_gap,
)

__all__ = [
    "__version__",
    "ChannelSnr",
    "CodeSpec",
    "CompositionPlan",
    "Constellation",
    "CqamParams",
    "FpSymbol",
    "MaxwellBoltzmann",
    "PasFrame",
    "Prime",
    "ShapingSolution",
    "ShellStructure",
    "Stretch",
    "SymbolDistribution",
    "add",
    "ask_energy",
    "ask_point",
    "ask_symbol",
    "build_ask",
    "build_cqam",
    "build_cqam_stretched",
    "capacity_gamma",
    "ccdm_decode",
    "ccdm_encode",
    "compute_table",
    "cqam_prior",
    "emit_table",
    "empirical_distributions",
    "encode",
    "figure_of_merit",
    "generate_frames",
    "is_prime",
    "map_frame",
    "mb_ask_prior",
    "mi_complex_cqam",
    "mi_complex_naive",
    "mi_real",
    "min_distance",
    "optimize_cqam",
    "optimize_shaped_ask",
    "optimize_time_sharing",
    "snr_for_rate",
    "sum_distribution_convolve",
    "sum_distribution_dft",
    "uniformity_gap",
]
