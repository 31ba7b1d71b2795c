"""einsys: Einstein-product tensor algebra, multi-linear systems, and a
MIMO-CDMA receiver simulator."""

__version__ = "0.1.0"

from .tensor import (
    DenseTensor,
    ModePairing,
    ModePartition,
    contracted_product,
    einstein_product,
    fiber,
    hermitian,
    identity_tensor,
    inner_product,
    is_pseudo_diagonal,
    is_pseudo_triangular,
    kronecker,
    n_mode_product,
    outer_product,
    p_norm,
    permute,
    tensor_slice,
    transpose,
)
from .matricize import fold, unfold
from .decomp import (
    LuDecompositionError,
    SingularTensorError,
    TensorEvd,
    TensorLu,
    TensorSvd,
    determinant,
    evd_hermitian,
    inv_pd,
    inverse,
    is_psd,
    lu,
    lu_solve,
    moore_penrose,
    sqrt_psd,
    svd,
    trace,
)
from .mlsys import (
    SystemTensor,
    TensorSequence,
    bibo_statistic_discrete,
    bibo_statistic_sampled_continuous,
    contracted_convolve,
    dtft_eval,
    sup_norm,
    z_transform_eval,
)
from .tn import (
    NetworkEdge,
    NetworkNode,
    NetworkSpec,
    spec_from_contraction,
    spec_from_convolution,
    to_dot,
)
from .cdma import (
    RECEIVERS,
    CdmaConfig,
    CdmaResult,
    ChannelSet,
    SpreadingSet,
    complex_normal,
    decode_two_stage,
    equivalent_channel,
    gen_channel,
    gen_spreading,
    nearest_symbol_indices,
    qam_constellation,
    receiver_matrices,
    receiver_matrix_a,
    receiver_matrix_b,
    run_monte_carlo,
    tml_mmse,
    transmit,
)
from .experiments import (
    ConfigError,
    config_from_dict,
    experiment1_config,
    experiment2_config,
    results_to_csv,
    run_ber_vs_snr,
    run_ber_vs_users,
)
from .verify import SuiteResult, run_verification

__all__ = [
    "__version__",
    # tensor
    "DenseTensor", "ModePartition", "ModePairing", "p_norm", "kronecker",
    "contracted_product", "einstein_product", "inner_product", "outer_product",
    "n_mode_product", "permute", "transpose", "hermitian", "identity_tensor",
    "is_pseudo_diagonal", "is_pseudo_triangular", "fiber", "tensor_slice",
    # matricize
    "unfold", "fold",
    # decomp
    "TensorSvd", "TensorEvd", "TensorLu", "SingularTensorError",
    "LuDecompositionError", "svd", "evd_hermitian", "inverse", "moore_penrose",
    "lu", "lu_solve", "trace", "determinant", "is_psd", "sqrt_psd", "inv_pd",
    # mlsys
    "TensorSequence", "SystemTensor", "contracted_convolve", "z_transform_eval",
    "dtft_eval", "bibo_statistic_discrete", "bibo_statistic_sampled_continuous",
    "sup_norm",
    # tn
    "NetworkNode", "NetworkEdge", "NetworkSpec", "to_dot",
    "spec_from_contraction", "spec_from_convolution",
    # cdma
    "RECEIVERS", "CdmaConfig", "CdmaResult", "ChannelSet", "SpreadingSet",
    "qam_constellation", "complex_normal", "gen_channel", "gen_spreading",
    "equivalent_channel", "transmit", "receiver_matrix_a", "receiver_matrix_b",
    "receiver_matrices", "nearest_symbol_indices", "decode_two_stage",
    "tml_mmse", "run_monte_carlo",
    # experiments
    "ConfigError", "experiment1_config", "experiment2_config",
    "config_from_dict", "run_ber_vs_snr", "run_ber_vs_users", "results_to_csv",
    # verify
    "SuiteResult", "run_verification",
]
