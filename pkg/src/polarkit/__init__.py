"""Channel polarization with arbitrary binary kernels."""

from ._kernels import BACKEND
from .bec import (
    ErasureVector,
    bec_levels,
    bec_polarize,
    bec_split_all,
    bec_split_one,
    erasure_polynomials,
    polarization_fraction,
    rate_statistic,
    rate_threshold,
)
from .channel import (
    BinaryChannel,
    CapacityError,
    ChannelError,
    InfoPair,
    bhattacharyya,
    bsc_pair_capacity,
    capacity_gap_lower_bound,
    inverse_binary_entropy,
    is_symmetric,
    make_bec,
    make_bsc,
    merge_equivalent_outputs,
    product_channel,
    random_symmetric_channel,
    symmetric_capacity,
)
from .codec import (
    CodeError,
    PolarCode,
    construct,
    encode,
    sc_decode,
    simulate_fer,
    union_bound,
)
from .gf2 import (
    BitMatrix,
    KernelError,
    gf2_rank,
    in_span,
    is_invertible,
    is_polarizing,
    kron_encode,
    kron_matrix,
    kron_power,
    last_reduction_weight,
    load_kernel,
    parse_kernel,
    unit_diagonalize,
)
from .split import SplitResult, recursive_polarize, split_all, split_joint, split_tilde
from .tree import ensemble_stats, sample_path, z_bound_check

__version__ = "0.1.0"
