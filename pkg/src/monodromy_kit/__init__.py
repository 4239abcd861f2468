from version import __version__

from .lab_error import MonodromyLabError
from .number_kit import format_complex, parse_complex
from .poly_kit import ComplexPoly, NonConvergence, all_roots, derivative, evaluate, min_separation
from .family_kit import (
    BranchSet, DegenerateLeadingCoeff, InterpolationIllConditioned, PolyFamily, SingularPoint,
    at_parameter, branch_points, canonical_key, discriminant_in_a, format_family, implicit_velocity,
    multiple_root_residual, parse_family,
)
from .path_spec import (
    ArcSegment, BaseMismatch, EndpointMismatch, Lasso, LineSegment, NotClosed, ParamPath, PathSegment,
    RadiusTooLarge, circle, commutator_path, compile_lasso, concat, default_lasso_radius, path_from_json,
    path_to_json, power, reverse, sample, winding_number,
)

__all__ = [
    "__version__",
    "MonodromyLabError",
    "format_complex", "parse_complex",
    "ComplexPoly", "NonConvergence", "all_roots", "derivative", "evaluate", "min_separation",
    "BranchSet", "DegenerateLeadingCoeff", "InterpolationIllConditioned", "PolyFamily", "SingularPoint",
    "at_parameter", "branch_points", "canonical_key", "discriminant_in_a", "format_family",
    "implicit_velocity", "multiple_root_residual", "parse_family",
    "ArcSegment", "BaseMismatch", "EndpointMismatch", "Lasso", "LineSegment", "NotClosed", "ParamPath",
    "PathSegment", "RadiusTooLarge", "circle", "commutator_path", "compile_lasso", "concat",
    "default_lasso_radius", "path_from_json", "path_to_json", "power", "reverse", "sample",
    "winding_number",
]
