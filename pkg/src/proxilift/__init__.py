"""Best approximation, metric complements, linear selections, and
norm-preserving quotient lifts in finite-dimensional normed spaces."""

from .core_spaces import (
    DEFAULT_TOL,
    DimensionMismatch,
    LinearMap,
    LpInfeasible,
    LpResult,
    LpUnbounded,
    Norm,
    RankDeficientBasis,
    Space,
    Subspace,
    Tolerance,
    UnsupportedNormPair,
    brute_distance_oracle,
    norm,
    operator_norm,
    optimal_face,
    solve_lp,
)
from .function_space import (
    ClosedSet1D,
    GridFunction,
    GridFunction2D,
    Star2DResult,
    aligned_grid_for,
    componentwise_selection,
    product_distance,
    star_selection_1d,
    star_selection_2d,
    vanishing_ideal_distance,
)
from .metric_projection import (
    ChebyshevKind,
    ChebyshevVerdict,
    ComplementDescription,
    ComplementKind,
    ProjectionResult,
    cheney_wulbert_decompose,
    complement_description,
    distance,
    in_metric_complement,
    is_chebyshev,
    linf2_complement,
    metric_projection,
)
from .quotient_lifting import (
    LiftReport,
    QuotientSpace,
    duality_lift,
    iso_from_selection,
    lift_from_l1,
    lift_norm_lower_bound_check,
    lift_operator,
    quotient_map,
    restrict_lift,
    selection_from_lift,
)
from .selection_engine import (
    NonlinearityWitness,
    SelectionCertificate,
    SelectionNotFound,
    SelectionStatus,
    find_linear_selection,
    hyperplane_selection,
    linf2_selection,
    span_support_qlp_test,
    validate_witness,
    verify_selection,
)

__all__ = [
    "ChebyshevKind",
    "ChebyshevVerdict",
    "ClosedSet1D",
    "ComplementDescription",
    "ComplementKind",
    "DEFAULT_TOL",
    "DimensionMismatch",
    "GridFunction",
    "GridFunction2D",
    "LiftReport",
    "LinearMap",
    "LpInfeasible",
    "LpResult",
    "LpUnbounded",
    "NonlinearityWitness",
    "Norm",
    "ProjectionResult",
    "QuotientSpace",
    "RankDeficientBasis",
    "SelectionCertificate",
    "SelectionNotFound",
    "SelectionStatus",
    "Space",
    "Star2DResult",
    "Subspace",
    "Tolerance",
    "UnsupportedNormPair",
    "aligned_grid_for",
    "brute_distance_oracle",
    "cheney_wulbert_decompose",
    "complement_description",
    "componentwise_selection",
    "distance",
    "duality_lift",
    "find_linear_selection",
    "hyperplane_selection",
    "in_metric_complement",
    "is_chebyshev",
    "iso_from_selection",
    "lift_from_l1",
    "lift_norm_lower_bound_check",
    "lift_operator",
    "linf2_complement",
    "linf2_selection",
    "metric_projection",
    "norm",
    "operator_norm",
    "optimal_face",
    "product_distance",
    "quotient_map",
    "restrict_lift",
    "selection_from_lift",
    "span_support_qlp_test",
    "star_selection_1d",
    "star_selection_2d",
    "vanishing_ideal_distance",
    "validate_witness",
    "verify_selection",
]
