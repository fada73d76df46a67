"""Distributed compression of two correlated binary sources.

Two binary words that agree in each position with probability p are
compressed separately to syndromes of sparse parity-check codes and
reconstructed together by belief propagation on a joint Tanner graph.
The correlation enters the graph as one parity check per bit position
whose hidden difference bit carries a constant log-likelihood ratio.
"""

from .correlation import (
    LLR_MAX,
    CorrelatedPair,
    CorrelationModel,
    RatePair,
    RegionCheck,
    binary_entropy,
    clamp_llr,
    conditional_entropy,
    hidden_llr,
    joint_entropy,
    sample_pair,
    sw_region_check,
)
from .decoder import (
    BruteForceResult,
    DecodeResult,
    DecoderConfig,
    IterationInfo,
    brute_force_marginals,
    decode,
)
from .graph import (
    EXPLICIT_Z,
    FOLDED_Z,
    JointTannerGraph,
    build_joint_graph,
    fold_hidden,
    is_cycle_free,
)
from .ldpc import (
    AlistFormatError,
    ConstructionError,
    SparseParityMatrix,
    as_bit_array,
    gallager_construct,
    gf2_rank,
    identity_matrix,
    load_alist,
    save_alist,
    syndrome,
)
from .sim import (
    SimConfig,
    SimRecord,
    configs_over_p,
    derive_trial_seed,
    format_csv,
    run_trials,
    sweep,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "LLR_MAX",
    "CorrelatedPair",
    "CorrelationModel",
    "RatePair",
    "RegionCheck",
    "binary_entropy",
    "clamp_llr",
    "conditional_entropy",
    "hidden_llr",
    "joint_entropy",
    "sample_pair",
    "sw_region_check",
    "AlistFormatError",
    "ConstructionError",
    "SparseParityMatrix",
    "as_bit_array",
    "gallager_construct",
    "gf2_rank",
    "identity_matrix",
    "load_alist",
    "save_alist",
    "syndrome",
    "EXPLICIT_Z",
    "FOLDED_Z",
    "JointTannerGraph",
    "build_joint_graph",
    "fold_hidden",
    "is_cycle_free",
    "BruteForceResult",
    "DecodeResult",
    "DecoderConfig",
    "IterationInfo",
    "brute_force_marginals",
    "decode",
    "SimConfig",
    "SimRecord",
    "configs_over_p",
    "derive_trial_seed",
    "format_csv",
    "run_trials",
    "sweep",
    "write_csv",
    "__version__",
]
