"""Matrix discrepancy toolkit.

Partial/full colorings of matrix families via Gaussian projection onto
discrepancy bodies, mirror-descent covering of polar bodies (spectraplex
and Schatten setups), constructive relative-entropy nets, lower-bound
instance families, and Monte-Carlo Gaussian-measure experiments.
"""

from .bounds import (
    BoundReport,
    SeparationResult,
    bound_all,
    eval_discrepancy,
    eval_discrepancy_batch,
    full_coloring_factor,
    separation_oracle,
)
from .coloring import (
    Coloring,
    FullColoring,
    PartialColoringError,
    PartialColoringParams,
    brute_force_min,
    full_color,
    partial_color,
)
from .entropy_net import (
    EntropyNet,
    build_entropy_net,
    entropy_from_op_check,
    mix_with_identity,
    net_error_sampled,
    opnorm_net_spectraplex,
)
from .instances import (
    Instance,
    InstanceValidationError,
    gen_diagonal_spencer,
    gen_hadamard_lower,
    gen_random,
    gen_rank1_lower,
    load,
    save,
    spencer_target,
)
from .linalg import (
    DomainError,
    Spectrum,
    frob_inner,
    quantum_rel_entropy,
    schatten_norm,
    spectral_fn,
    sym_eig,
    sym_exp,
    sym_log,
)
from .measure import MeasureEstimate, mc_gaussian_measure, measure_exponent_sweep
from .mirror import (
    MDResult,
    MirrorState,
    bregman,
    enumerate_cover,
    eta_for,
    md_iterate,
    md_minimize,
    net_size_bound,
    subgrad_fU,
    verify_cover_sampled,
)

__version__ = "0.1.0"
