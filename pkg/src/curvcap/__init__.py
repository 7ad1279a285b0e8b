"""curvcap: prescribe discrete curvature on triangulated surfaces with
boundary.

On a closed surface the total curvature is pinned to 2*pi*chi, and closed
solvers inherit that constraint. On a surface with boundary nothing is
pinned: cap each boundary loop with a disk, extend the target data so the
closed-mesh constraint lands on the caps, solve there, and restrict the
metric back. This package implements that route end to end for triangle
meshes with intrinsic edge-length metrics, plus the discrete Gauss-Bonnet
machinery used to verify every step.
"""

from .capping import CapAtlas, CapLoop, cap_all, restrict
from .curvature import (
    CurvatureReport,
    all_angle_defects,
    angle_defect,
    gauss_bonnet_check,
    turning_angle,
)
from .errors import (
    BoundaryVertex,
    ConeAngleViolation,
    CurvcapError,
    DegenerateTriangle,
    Disconnected,
    IndexMismatch,
    InteriorVertex,
    InvalidFace,
    LineSearchStall,
    MaxIterExceeded,
    NoBoundary,
    NoInteriorVertex,
    NonManifoldEdge,
    NonManifoldVertex,
    NonOrientable,
    NotClosed,
    SolverFailure,
    TargetSumMismatch,
    ValidationError,
    ZeroInteriorMass,
)
from .fields import (
    ExtensionReport,
    FaceForm,
    VertexField,
    extend_field_sign_condition,
    extend_form_gauss_bonnet,
    extend_form_prescribed_integral,
    integrate,
    sign_condition_holds,
)
from .mesh import Mesh, MetricLengths, corner_angle, load_mesh
from .pipeline import (
    CapTargetReport,
    PrescriptionResult,
    prescribe_form,
    prescribe_function,
    split_form_to_vertices,
    verify,
)
from .solver import (
    ConformalFactors,
    SolveOptions,
    SolveTrace,
    conformal_lengths,
    cotan_laplacian,
    curvature_map,
    lobachevsky,
    prescription_energy,
    solve_prescribed_curvature,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # mesh
    "Mesh", "MetricLengths", "load_mesh", "corner_angle",
    # capping
    "CapAtlas", "CapLoop", "cap_all", "restrict",
    # fields
    "FaceForm", "VertexField", "ExtensionReport", "integrate",
    "extend_form_prescribed_integral", "extend_form_gauss_bonnet",
    "extend_field_sign_condition", "sign_condition_holds",
    # curvature
    "CurvatureReport", "angle_defect", "turning_angle", "all_angle_defects",
    "gauss_bonnet_check",
    # solver
    "ConformalFactors", "SolveOptions", "SolveTrace", "conformal_lengths",
    "curvature_map", "cotan_laplacian", "prescription_energy", "lobachevsky",
    "solve_prescribed_curvature",
    # pipeline
    "PrescriptionResult", "CapTargetReport", "prescribe_function",
    "prescribe_form", "split_form_to_vertices", "verify",
    # errors
    "CurvcapError", "ValidationError", "SolverFailure",
    "NonManifoldEdge", "NonManifoldVertex", "NonOrientable",
    "DegenerateTriangle", "Disconnected", "InvalidFace", "NoBoundary",
    "NotClosed", "NoInteriorVertex", "IndexMismatch", "BoundaryVertex",
    "InteriorVertex", "ZeroInteriorMass", "TargetSumMismatch",
    "ConeAngleViolation", "LineSearchStall", "MaxIterExceeded",
]
