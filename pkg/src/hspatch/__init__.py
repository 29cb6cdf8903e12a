"""Hermite bicubic patches whose diagonal parameter lines stay cubic.

The package builds patches from 12 controls per coordinate (corners and
boundary tangents), derives the twist entries from a rank-5 linear condition
system, converts between Hermite/Bezier/B-spline forms, tessellates to
triangle meshes, and audits polynomial degree and inter-patch continuity.
"""

from .algebra import LinearForm, linform_mat_mul, mat4_inverse, rank_exact
from .analysis import ContinuityReport, Side, continuity_check, degree_audit
from .convert import conversion_matrix, convert_curve, convert_patch
from .errors import (
    BasisMismatchError,
    DocumentError,
    GeometryError,
    InfeasiblePatchError,
    SingularMatrixError,
)
from .hs import (
    DEFAULT_TOL,
    ConstraintReport,
    HsControls,
    HsPatch,
    HsPatchInput,
    Policy,
    build_hs_patch,
    build_lambda,
    complete_twists,
    constraint_report,
    control_matrix,
    control_vector,
    project_tangents,
    verify_hs,
)
from .mesh import TessPattern, TriangleMesh, export_obj, tessellate
from .patch import (
    Basis,
    DiagonalPoly,
    GeometricPatch,
    PatchJet,
    basis_matrix,
    effective_degree,
    eval_curve,
    eval_patch_jet,
    eval_patch_point,
    fit_line_oracle,
    line_restriction_coeffs,
    monomial_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BasisMismatchError",
    "ConstraintReport",
    "ContinuityReport",
    "DEFAULT_TOL",
    "DiagonalPoly",
    "DocumentError",
    "GeometricPatch",
    "GeometryError",
    "HsControls",
    "HsPatch",
    "HsPatchInput",
    "InfeasiblePatchError",
    "LinearForm",
    "PatchJet",
    "Policy",
    "Side",
    "SingularMatrixError",
    "TessPattern",
    "TriangleMesh",
    "basis_matrix",
    "build_hs_patch",
    "build_lambda",
    "complete_twists",
    "constraint_report",
    "continuity_check",
    "control_matrix",
    "control_vector",
    "conversion_matrix",
    "convert_curve",
    "convert_patch",
    "degree_audit",
    "effective_degree",
    "eval_curve",
    "eval_patch_jet",
    "eval_patch_point",
    "export_obj",
    "fit_line_oracle",
    "line_restriction_coeffs",
    "linform_mat_mul",
    "mat4_inverse",
    "monomial_matrix",
    "project_tangents",
    "rank_exact",
    "tessellate",
    "verify_hs",
]
