"""Fractional integral operators and oscillation norms on finite weighted metric measure spaces."""

from .space import (
    Ball,
    Bergman,
    MeasureBased,
    PowerLaw,
    Space,
    SpaceConstants,
    Tabulated,
    check_geometric_doubling,
    check_lambda_regularity,
    check_upper_doubling,
    check_weak_growth,
    check_weak_reverse_doubling,
    dominating_at,
    load_space,
    mu_ball,
    space_from_arrays,
)
from .geometry import (
    CoefficientValue,
    doubling_threshold,
    fractional_shell_coefficient,
    gap_coefficient,
    shell_coefficient,
    smallest_doubling_ball,
    vitali_select,
)
from .kernels import KernelSpec, KernelFit, check_size_condition, check_smoothness_condition, eval_kernel
from .operators import (
    apply_operator,
    as_function,
    commutator,
    commutator_expansion,
    fractional_integral,
    index_subsets,
    multilinear_commutator,
)
from .maximal import doubling_maximal, fractional_maximal, maximal_mean, sharp_maximal
from .norms import (
    Power,
    RbmoEstimate,
    TabulatedOrlicz,
    ZygmundLog,
    ball_mean,
    lp_norm,
    luxemburg_norm,
    orlicz_indices,
    osc_exp_norm,
    rbmo_norm,
    target_orlicz,
    weak_lp,
    zygmund_function,
)
from .czd import AtomicBlockReport, CZDecomposition, cz_decompose, validate_atomic_block
from .fixtures import FixtureSpec, make_atomic_blocks, make_function_family, make_space, s3

__version__ = "0.1.0"
