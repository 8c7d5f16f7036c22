"""Hierarchical renormalization of Gaussian scalar fields on triangles.

The pieces: a shape space of marked triangles (cotangent vectors on a
Minkowski hyperboloid, equivalently the hyperbolic half plane), the
centroid-subdivision semigroup acting on it, the exact decimation map on
permutation-covariant quadratic actions, and a brute-force
Schur-complement oracle that re-derives the decimation from assembled
stiffness matrices.
"""

__version__ = "0.1.0"

from .action import (ActionFamily, QuadForm3, ResidualReport,
                     RGStepBreakdown, action_matrix, assemble_subdivided,
                     barycentric, constant_family, cotangent_action,
                     cotangent_family, fixed_point_residual,
                     integrate_out_center, interpolant_energy,
                     projective_residual, quadrature_energy, rg_step,
                     sample_shapes)
from .errors import (AngleDomain, DegenerateTriangle, DepthExceeded,
                     HalfPlaneDomain, IdentityViolation, NonPositiveA,
                     SingularInterior, TrirgError)
from .schur import (EliminationReport, StiffnessMatrix, assemble_stiffness,
                    eliminate_interior, eliminate_levelwise,
                    verify_hierarchical)
from .shape import (CENTER, GENERATORS, IDENTITY, ROTATE, SWAP,
                    CotangentVector, GroupElement, HalfPlanePoint,
                    MinkowskiVector, apply_group, cot_from_angles,
                    cot_from_coords, flatness, from_halfplane,
                    identity_residual, identity_tolerance, moebius,
                    to_halfplane, to_minkowski)
from .subdivide import (FlowStats, HierMesh, MeshTriangle, build_mesh,
                        flow_csv, mesh_shape_audit, random_flow, run_word,
                        subdivide_shape, word_element)

__all__ = [
    "__version__",
    "ActionFamily", "QuadForm3", "ResidualReport", "RGStepBreakdown",
    "action_matrix", "assemble_subdivided", "barycentric",
    "constant_family", "cotangent_action", "cotangent_family",
    "fixed_point_residual", "integrate_out_center", "interpolant_energy",
    "projective_residual", "quadrature_energy", "rg_step", "sample_shapes",
    "AngleDomain", "DegenerateTriangle", "DepthExceeded", "HalfPlaneDomain",
    "IdentityViolation", "NonPositiveA", "SingularInterior", "TrirgError",
    "EliminationReport", "StiffnessMatrix", "assemble_stiffness",
    "eliminate_interior", "eliminate_levelwise", "verify_hierarchical",
    "CENTER", "GENERATORS", "IDENTITY", "ROTATE", "SWAP",
    "CotangentVector", "GroupElement", "HalfPlanePoint", "MinkowskiVector",
    "apply_group", "cot_from_angles", "cot_from_coords", "flatness",
    "from_halfplane", "identity_residual", "identity_tolerance", "moebius",
    "to_halfplane", "to_minkowski",
    "FlowStats", "HierMesh", "MeshTriangle", "build_mesh", "flow_csv",
    "mesh_shape_audit", "random_flow", "run_word", "subdivide_shape",
    "word_element",
]
