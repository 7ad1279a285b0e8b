"""Exception hierarchy.

Two families matter to callers: validation errors (bad input data, bad mesh,
bad targets) and solver failures (the input was legal but the Newton solve
could not finish). The CLI maps the former to exit code 1 and the latter to
exit code 2; the HTTP service maps them to status 400 and 409.
"""


class CurvcapError(Exception):
    """Base class for all library errors."""


class ValidationError(CurvcapError):
    """Input data violates a documented precondition or invariant."""


class NonManifoldEdge(ValidationError):
    """An edge is shared by more than two faces."""


class NonManifoldVertex(ValidationError):
    """The faces around a vertex do not form a single fan."""


class NonOrientable(ValidationError):
    """Face windings cannot be made globally consistent."""


class DegenerateTriangle(ValidationError):
    """Edge lengths violate a strict triangle inequality (or an angle
    computation left the open interval (0, pi))."""


class Disconnected(ValidationError):
    """The surface is not connected, or a vertex belongs to no face."""


class InvalidFace(ValidationError):
    """A face row is malformed (repeated vertex, duplicate face, bad index)."""


class NoBoundary(ValidationError):
    """cap_all was asked to cap a closed mesh."""


class NotClosed(ValidationError):
    """An operation that needs a closed mesh received one with boundary."""


class NoInteriorVertex(ValidationError):
    """prescribe_function needs at least one interior vertex."""


class IndexMismatch(ValidationError):
    """Data is indexed on a different mesh than the operation expects."""


class BoundaryVertex(ValidationError):
    """angle_defect was asked about a vertex on the boundary."""


class InteriorVertex(ValidationError):
    """turning_angle was asked about a vertex not on the boundary."""


class ZeroInteriorMass(ValidationError):
    """A form extension has nothing to rescale: the seeded cap interior sums
    to zero, so no scale factor can hit the prescribed integral."""


class TargetSumMismatch(ValidationError):
    """Prescribed curvatures on a closed mesh must sum to 2*pi*chi."""


class ConeAngleViolation(ValidationError):
    """A prescribed vertex curvature is >= 2*pi, leaving no positive cone
    angle at that vertex."""


class SolverFailure(CurvcapError):
    """The Newton solve started but could not reach the tolerance."""


class LineSearchStall(SolverFailure):
    """Backtracking shrank the step below min_step. Usually the target is
    outside the feasible region of the fixed connectivity."""


class MaxIterExceeded(SolverFailure):
    """Iteration limit reached before the residual tolerance."""
