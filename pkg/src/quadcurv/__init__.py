"""Four-point curvature conditions for finite metric spaces and model geometries."""

from .conditions import (
    ConditionReport,
    check_all_labelings,
    midpoint_residual,
    one_plus_three_residual,
    star_minus_residual,
    star_plus_residual,
    star_residual,
)
from .embedding import EmbeddingResult, embed_any, embed_plane, embed_sphere
from .iteration import IterationTrace, run_iteration, verify_recursion
from .metric_core import (
    FiniteMetricSpace,
    LabeledQuadruple,
    counterexample_F,
    quadruples,
    validate,
)
from .model_geometry import (
    Euclidean,
    EuclideanCone,
    Hyperbolic,
    Product,
    Sphere,
    comparison_angle,
    distance,
    midpoint,
    quadruple_from_points,
    sample,
)

__all__ = [
    "ConditionReport", "EmbeddingResult", "Euclidean", "EuclideanCone", "FiniteMetricSpace",
    "Hyperbolic", "IterationTrace", "LabeledQuadruple", "Product", "Sphere",
    "check_all_labelings", "comparison_angle", "counterexample_F", "distance", "embed_any",
    "embed_plane", "embed_sphere", "midpoint", "midpoint_residual", "one_plus_three_residual",
    "quadruple_from_points", "quadruples", "run_iteration", "sample", "star_minus_residual",
    "star_plus_residual", "star_residual", "validate", "verify_recursion",
]
