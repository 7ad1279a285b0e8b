"""Newton solver for prescribed vertex curvatures on a closed mesh.

The unknowns are per-vertex log scale factors u; edge lengths transform by
L'_ij = exp((u_i + u_j)/2) * L_ij. In these variables the prescription
problem is the gradient flow of a convex energy:

    grad E(u)_v  =  K(u)_v - target_v
    hess E(u)    =  the cotangent-weight matrix of the current metric,

where K(u) are the angle defects. The Hessian is positive semidefinite with
a one-dimensional null space spanned by constants (a global scale changes no
angle), removed by the gauge sum(u) = 0. Each Newton iteration solves one
sparse symmetric system and backtracks until the step keeps every triangle
inequality strictly satisfied and decreases both the energy and the
curvature residual. Everything is deterministic: same inputs, same bits.

The energy itself is evaluated through the Lobachevsky function (the
Clausen-type integral of -log|2 sin t|), computed by a zeta-accelerated
series accurate to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import zeta

from .curvature import all_angle_defects
from .errors import (
    ConeAngleViolation,
    DegenerateTriangle,
    IndexMismatch,
    LineSearchStall,
    MaxIterExceeded,
    NotClosed,
    TargetSumMismatch,
)
from .fields import VertexField
from .mesh import Mesh, MetricLengths, corner_angles

__all__ = [
    "ConformalFactors",
    "SolveOptions",
    "IterationRecord",
    "SolveTrace",
    "lobachevsky",
    "conformal_lengths",
    "curvature_map",
    "cotan_laplacian",
    "prescription_energy",
    "solve_prescribed_curvature",
]

TARGET_SUM_TOL = 1e-8

# zeta(2k) for the Lobachevsky series; 30 terms reach machine precision on
# the reduced range theta <= pi/2 (term ratio <= 1/4).
_LOB_K = np.arange(1, 31)
_LOB_COEF = zeta(2.0 * _LOB_K) / (_LOB_K * (2 * _LOB_K + 1))


def lobachevsky(theta) -> np.ndarray | float:
    """Lobachevsky function -int_0^theta log|2 sin t| dt.

    pi-periodic and odd; evaluated by reducing to [0, pi/2] and summing
    L(t) = t - t log(2t) + t * sum_k zeta(2k)/(k(2k+1)) (t/pi)^(2k).
    """
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.mod(np.atleast_1d(th), np.pi)
    sign = np.ones_like(th)
    hi = th > np.pi / 2
    th = np.where(hi, np.pi - th, th)
    sign[hi] = -1.0
    out = np.zeros_like(th)
    nz = th > 0.0
    t = th[nz]
    x = (t / np.pi) ** 2
    acc = np.zeros_like(t)
    p = np.ones_like(t)
    for coef in _LOB_COEF:
        p = p * x
        acc += coef * p
    out[nz] = t - t * np.log(2.0 * t) + t * acc
    out *= sign
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class ConformalFactors:
    """Per-vertex log scale factors. Solver outputs are gauge-normalized
    (sum is zero); raw factors are accepted wherever a metric is rescaled."""

    mesh: Mesh
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.shape != (self.mesh.num_vertices,):
            raise IndexMismatch(
                f"need {self.mesh.num_vertices} factors, got shape {u.shape}"
            )
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def normalized(self) -> "ConformalFactors":
        return ConformalFactors(self.mesh, self.u - self.u.mean())


@dataclass(frozen=True)
class SolveOptions:
    """Newton solve knobs. ``tol`` bounds the max-norm curvature residual."""

    tol: float = 1e-10
    max_iter: int = 50
    line_search_shrink: float = 0.5
    min_step: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0.0 < self.line_search_shrink < 1.0:
            raise ValueError("line_search_shrink must lie in (0, 1)")
        if not self.min_step > 0:
            raise ValueError("min_step must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    step: float
    energy: float

    def to_json_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "residual": self.residual,
            "step": self.step,
            "energy": self.energy,
        }


@dataclass(frozen=True)
class SolveTrace:
    """Per-iteration progress. Record 0 is the starting state; residuals at
    accepted steps decrease strictly (the line search enforces it)."""

    records: tuple[IterationRecord, ...]
    termination: str

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration if self.records else 0

    def to_json_lines(self) -> str:
        import json  # canonical formatting applied by the CLI layer

        lines = [json.dumps(r.to_json_dict(), sort_keys=True) for r in self.records]
        lines.append(json.dumps({"termination": self.termination}, sort_keys=True))
        return "\n".join(lines) + "\n"


def _factors_array(mesh: Mesh, u) -> np.ndarray:
    if isinstance(u, ConformalFactors):
        if u.mesh is not mesh and u.mesh != mesh:
            raise IndexMismatch("factors belong to a different mesh")
        return u.u
    arr = np.asarray(u, dtype=float)
    if arr.shape != (mesh.num_vertices,):
        raise IndexMismatch(f"need {mesh.num_vertices} factors, got {arr.shape}")
    return arr


def conformal_lengths(metric: MetricLengths, u) -> MetricLengths:
    """Rescaled metric L'_ij = exp((u_i + u_j)/2) L_ij.

    Triangle inequalities are intentionally not checked here; callers decide
    whether a violating candidate is an error or a rejected line-search step.
    """
    mesh = metric.mesh
    uu = _factors_array(mesh, u)
    e = np.asarray(mesh.edges, dtype=np.int64)
    values = metric.values * np.exp(0.5 * (uu[e[:, 0]] + uu[e[:, 1]]))
    return MetricLengths(mesh, values)


def curvature_map(mesh: Mesh, metric: MetricLengths, u) -> VertexField:
    """Angle defects of the rescaled metric on a closed mesh."""
    if not mesh.is_closed:
        raise NotClosed("curvature_map needs a closed mesh")
    rescaled = conformal_lengths(metric, u)
    rescaled.validate()
    return VertexField(mesh, all_angle_defects(mesh, rescaled))


def cotan_laplacian(mesh: Mesh, metric: MetricLengths) -> sp.csr_matrix:
    """Cotangent-weight matrix: off-diagonal -w_ij with w_ij the half-sum of
    cotangents of the angles opposite edge ij, diagonal the row sums. Equals
    the Jacobian of the angle-defect map in the conformal factors."""
    angles = corner_angles(mesh, metric)
    half_cot = 0.5 / np.tan(angles)  # contribution of each corner to its opposite edge
    ne = mesh.num_edges
    w = np.zeros(ne)
    np.add.at(w, mesh.face_edges.reshape(-1), half_cot.reshape(-1))
    e = np.asarray(mesh.edges, dtype=np.int64)
    i, j = e[:, 0], e[:, 1]
    n = mesh.num_vertices
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([-w, -w, w, w])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _face_degree(mesh: Mesh) -> np.ndarray:
    return np.bincount(mesh.face_array.reshape(-1), minlength=mesh.num_vertices)


def prescription_energy(mesh: Mesh, metric: MetricLengths, u, target) -> float:
    """Convex energy whose gradient is K(u) - target.

    Per face, sum angle * (2 log of the opposite rescaled length) plus twice
    the Lobachevsky function of each angle; minus the linear term
    sum_v (pi deg_v - 2 pi + target_v) u_v. Raises DegenerateTriangle when
    the rescaled metric breaks a triangle inequality.
    """
    uu = _factors_array(mesh, u)
    tv = np.asarray(target, dtype=float)
    rescaled = conformal_lengths(metric, uu)
    rescaled.validate()
    angles = corner_angles(mesh, rescaled)
    return _energy_value(mesh, rescaled, angles, tv, uu)


def _energy_value(mesh, lengths, angles, tv, u) -> float:
    lam = 2.0 * np.log(lengths.values)
    core = float(np.sum(angles * lam[mesh.face_edges]) + 2.0 * np.sum(lobachevsky(angles)))
    coef = np.pi * _face_degree(mesh) - 2.0 * np.pi + tv
    return core - float(coef @ u)


def _solve_gauge(H: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
    """Solve H d = rhs modulo constants and return the zero-mean solution.

    H is PSD with null space spanned by the constant vector, so pinning one
    vertex leaves a positive definite system; projecting out the mean then
    picks the gauge representative."""
    n = H.shape[0]
    Hr = H[1:, :][:, 1:].tocsc()
    d = np.zeros(n)
    d[1:] = spla.spsolve(Hr, rhs[1:])
    return d - d.mean()


def solve_prescribed_curvature(
    mesh: Mesh,
    metric: MetricLengths,
    target,
    options: SolveOptions | None = None,
) -> tuple[ConformalFactors, MetricLengths, SolveTrace]:
    """Find conformal factors whose angle defects match ``target``.

    ``target`` is a VertexField on ``mesh`` (or a plain array). It must sum
    to 2*pi*chi within 1e-8 and stay below 2*pi at every vertex. Returns the
    gauge-normalized factors, the realized metric and the iteration trace;
    raises LineSearchStall when the target lies outside what this fixed
    connectivity can reach, and MaxIterExceeded past the iteration budget.
    """
    opts = options or SolveOptions()
    if not mesh.is_closed:
        raise NotClosed("solve_prescribed_curvature needs a closed mesh")
    if isinstance(target, VertexField):
        if target.mesh is not mesh and target.mesh != mesh:
            raise IndexMismatch("target field belongs to a different mesh")
        tv = target.values
    else:
        tv = np.asarray(target, dtype=float)
        if tv.shape != (mesh.num_vertices,):
            raise IndexMismatch(
                f"need {mesh.num_vertices} target values, got {tv.shape}"
            )
    metric.validate()
    if np.any(tv >= 2.0 * np.pi):
        worst = int(np.argmax(tv))
        raise ConeAngleViolation(
            f"target at vertex {worst} is {tv[worst]:.6g} >= 2*pi; the cone "
            f"angle there would not be positive"
        )
    gb_total = 2.0 * np.pi * mesh.euler_characteristic
    gap = float(tv.sum() - gb_total)
    if abs(gap) > TARGET_SUM_TOL:
        raise TargetSumMismatch(
            f"target sums to 2*pi*chi {gap:+.3e}; on a closed mesh the total "
            f"curvature is pinned to 2*pi*chi = {gb_total:.17g}"
        )

    n = mesh.num_vertices
    u = np.zeros(n)
    lengths = conformal_lengths(metric, u)
    defects = all_angle_defects(mesh, lengths)
    residual = float(np.abs(defects - tv).max())
    energy = prescription_energy(mesh, metric, u, tv)
    records = [IterationRecord(0, residual, 0.0, energy)]

    iteration = 0
    while residual > opts.tol:
        if iteration >= opts.max_iter:
            raise MaxIterExceeded(
                f"residual {residual:.3e} > tol {opts.tol:.3e} after "
                f"{opts.max_iter} iterations"
            )
        iteration += 1
        H = cotan_laplacian(mesh, lengths)
        direction = _solve_gauge(H, tv - defects)

        # Accept a step only if it is feasible, strictly shrinks the
        # residual, and does not increase the energy. The energy test gets a
        # few-ulp slack: near convergence the true decrease (residual^2
        # scale) drops below what doubles can resolve.
        energy_slack = 1e-13 * (1.0 + abs(energy))
        step = 1.0
        while True:
            u_try = u + step * direction
            trial = _evaluate(mesh, metric, u_try, tv)
            if trial is not None:
                lengths_try, defects_try, energy_try = trial
                residual_try = float(np.abs(defects_try - tv).max())
                if energy_try <= energy + energy_slack and residual_try < residual:
                    break
            step *= opts.line_search_shrink
            if step < opts.min_step:
                why = (
                    "triangle inequalities fail along the Newton direction"
                    if trial is None
                    else "no step decreases both energy and residual"
                )
                raise LineSearchStall(
                    f"step fell below min_step={opts.min_step:g} at iteration "
                    f"{iteration}: {why} (fixed-connectivity limitation)"
                )

        u, lengths, defects = u_try, lengths_try, defects_try
        energy, residual = energy_try, residual_try
        records.append(IterationRecord(iteration, residual, step, energy))

    factors = ConformalFactors(mesh, u).normalized()
    trace = SolveTrace(tuple(records), "converged")
    return factors, lengths, trace


def _evaluate(mesh, metric, u, tv):
    """Metric, defects and energy at u, or None when u is infeasible."""
    lengths = conformal_lengths(metric, u)
    if not lengths.is_valid():
        return None
    try:
        angles = corner_angles(mesh, lengths)
    except DegenerateTriangle:
        return None
    sums = np.zeros(mesh.num_vertices)
    np.add.at(sums, mesh.face_array.reshape(-1), angles.reshape(-1))
    defects = 2.0 * np.pi - sums
    return lengths, defects, _energy_value(mesh, lengths, angles, tv, u)
