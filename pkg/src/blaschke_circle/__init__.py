"""Multimodal circle maps from Blaschke-type products.

Evaluation of the family, critical-value geometry, inversion of the
critical-value map, combinatorial models and the Thurston pull-back
iteration that realizes them, and tracing of B^{-1}(S^1).
"""
from .combinatorics import (
    CombinatorialModel,
    Violation,
    compute_s_indices,
    four_modal_model,
    orbifold_hyperbolicity_check,
    orbifold_report,
    resolve_offsets,
    type_feasibility_margin,
    validate_model,
)
from .core import (
    INFINITY,
    KappaVector,
    ParameterPoint,
    eval_B,
    eval_B_prime,
    lift_derivative,
    lift_second_derivative,
    lift_value,
)
from .critical import (
    CriticalProfile,
    TargetVector,
    compute_phi,
    compute_type,
    find_critical_points,
    gap_vector,
    is_in_Delta,
    riemann_hurwitz_report,
    seed_parameters,
)
from .errors import (
    BlaschkeError,
    BranchMismatch,
    ContinuationStall,
    DegenerateConfiguration,
    DegenerateCritical,
    DomainError,
    EndpointMismatch,
    GapViolation,
    InvalidCombinatorics,
    NotAlternating,
    NotConverged,
    NotMultimodal,
    SeedFailure,
    TargetOutsideV,
    TraceLost,
    TypeUnrealizable,
)
from .inverse import (
    cauchy_determinant,
    continue_to_target,
    jacobian_phi,
    jacobian_phi_fd,
    solve_phi_inverse,
)
from .thurston import (
    IterationResult,
    apply_T,
    fixed_point_residual,
    iterate_to_fixed_point,
    w_epsilon_check,
)
from .tracer import TracedCurve, export_geometry, trace_gamma, verify_decomposition

__version__ = "0.1.0"
