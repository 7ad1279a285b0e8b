"""End-to-end curvature prescription on surfaces with boundary.

The route is always cap -> build a closed-mesh target -> solve -> restrict:
close the surface with disk caps, let the caps absorb the topological
constraint (on a closed mesh the total curvature is pinned to 2*pi*chi, on
the bounded original nothing is pinned), solve for a conformal metric, and
copy the solved lengths back to the original edges. An interior vertex of
the original has all its faces inside the original, so its defect survives
restriction unchanged: the prescription error on the original is exactly
the solver residual there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .capping import CapAtlas, cap_all, restrict
from .curvature import gauss_bonnet_check, vertex_angle_sums
from .errors import (
    ConeAngleViolation,
    CurvcapError,
    IndexMismatch,
    NoInteriorVertex,
)
from .fields import (
    ExtensionReport,
    FaceForm,
    VertexField,
    extend_form_gauss_bonnet,
)
from .mesh import Mesh, MetricLengths
from .solver import SolveOptions, SolveTrace, solve_prescribed_curvature

__all__ = [
    "CapTargetReport",
    "PrescriptionResult",
    "prescribe_function",
    "prescribe_form",
    "split_form_to_vertices",
    "verify",
]


@dataclass(frozen=True)
class CapTargetReport:
    """How the Gauss-Bonnet deficit was spread over cap-owned vertices."""

    deficit: float
    weights: str  # "equal" or "2:1:1"
    ring_value: float
    inner_value: float
    apex_value: float
    chi_capped: int

    def to_json_dict(self) -> dict:
        return {
            "kind": "cap_deficit",
            "deficit": self.deficit,
            "weights": self.weights,
            "ring_value": self.ring_value,
            "inner_value": self.inner_value,
            "apex_value": self.apex_value,
            "chi_capped": self.chi_capped,
        }


@dataclass(frozen=True)
class PrescriptionResult:
    """Outcome of one prescription run, restricted to the original mesh.

    ``achieved`` and ``target_on_m`` are keyed by the interior vertices of
    the original mesh; ``max_error`` is their max-norm gap.
    """

    metric_on_m: MetricLengths
    achieved: dict[int, float]
    target_on_m: dict[int, float]
    max_error: float
    extension_report: ExtensionReport | CapTargetReport
    solve_trace: SolveTrace
    atlas: CapAtlas

    def to_json_dict(self) -> dict:
        mesh = self.metric_on_m.mesh
        achieved = [None] * mesh.num_vertices
        target = [None] * mesh.num_vertices
        for v, x in self.achieved.items():
            achieved[v] = x
        for v, x in self.target_on_m.items():
            target[v] = x
        return {
            "lengths": [
                [i, j, float(L)]
                for (i, j), L in zip(mesh.edges, self.metric_on_m.values)
            ],
            "achieved": achieved,
            "target": target,
            "max_error": self.max_error,
            "extension_report": self.extension_report.to_json_dict(),
            "iterations": self.solve_trace.iterations,
            "termination": self.solve_trace.termination,
        }


def _interior_defects(mesh: Mesh, metric: MetricLengths) -> dict[int, float]:
    sums = vertex_angle_sums(mesh, metric)
    return {v: float(2.0 * math.pi - sums[v]) for v in mesh.interior_vertices}


def _cap_vertex_classes(atlas: CapAtlas):
    ring, inner, apexes = [], [], []
    for loop in atlas.loops:
        ring.extend(loop.boundary_vertices)
        inner.extend(loop.inner_ring_vertices)
        apexes.append(loop.apex_vertex)
    return ring, inner, apexes


def _distribute_deficit(atlas: CapAtlas, deficit: float) -> tuple[np.ndarray, CapTargetReport]:
    """Spread ``deficit`` over cap-owned vertices, equal weight first, one
    2:1:1 (ring : inner ring : apex) retry, then give up."""
    ring, inner, apexes = _cap_vertex_classes(atlas)
    chi = atlas.capped.euler_characteristic
    n_total = len(ring) + len(inner) + len(apexes)

    plans = [
        ("equal", 1.0, 1.0, 1.0),
        ("2:1:1", 2.0, 1.0, 1.0),
    ]
    two_pi = 2.0 * math.pi
    for name, wr, wi, wa in plans:
        weight_sum = wr * len(ring) + wi * len(inner) + wa * len(apexes)
        rv, iv, av = (deficit * w / weight_sum for w in (wr, wi, wa))
        if max(rv, iv, av) < two_pi:
            values = np.zeros(atlas.capped.num_vertices)
            values[ring] = rv
            values[inner] = iv
            values[apexes] = av
            report = CapTargetReport(
                deficit=float(deficit),
                weights=name,
                ring_value=float(rv),
                inner_value=float(iv),
                apex_value=float(av),
                chi_capped=chi,
            )
            return values, report
    raise ConeAngleViolation(
        f"spreading the Gauss-Bonnet deficit {deficit:.6g} over {n_total} "
        f"cap vertices exceeds 2*pi per vertex under both weightings"
    )


def prescribe_function(
    mesh: Mesh,
    metric: MetricLengths,
    target,
    options: SolveOptions | None = None,
) -> PrescriptionResult:
    """Realize ``target`` as the angle defects at the interior vertices of a
    bounded mesh. No sign or integral condition is asked of the target; the
    caps absorb the closed-surface constraint.

    ``target`` is either a mapping {interior vertex: value} or a VertexField
    on ``mesh`` whose boundary entries are ignored.
    """
    interior = mesh.interior_vertices
    if not interior:
        raise NoInteriorVertex("mesh has no interior vertex to prescribe at")

    if isinstance(target, VertexField):
        if target.mesh is not mesh and target.mesh != mesh:
            raise IndexMismatch("target field belongs to a different mesh")
        wanted = {v: float(target.values[v]) for v in interior}
    elif isinstance(target, Mapping):
        extra = set(target) - set(interior)
        if extra:
            raise IndexMismatch(
                f"target prescribes non-interior vertices {sorted(extra)[:5]}"
            )
        missing = set(interior) - set(target)
        if missing:
            raise IndexMismatch(
                f"target misses interior vertices {sorted(missing)[:5]}"
            )
        wanted = {int(v): float(x) for v, x in target.items()}
    else:
        raise TypeError("target must be a VertexField or a mapping")

    two_pi = 2.0 * math.pi
    for v, x in wanted.items():
        if x >= two_pi:
            raise ConeAngleViolation(
                f"target at vertex {v} is {x:.6g} >= 2*pi"
            )

    capped, capped_metric, atlas = cap_all(mesh, metric)
    deficit = two_pi * capped.euler_characteristic - sum(wanted.values())
    capped_target, report = _distribute_deficit(atlas, deficit)
    for v, x in wanted.items():
        capped_target[v] = x

    factors, solved, trace = solve_prescribed_curvature(
        capped, capped_metric, capped_target, options
    )
    metric_on_m = restrict(solved, atlas)
    achieved = _interior_defects(mesh, metric_on_m)
    max_error = max(abs(achieved[v] - wanted[v]) for v in interior)
    return PrescriptionResult(
        metric_on_m=metric_on_m,
        achieved=achieved,
        target_on_m=wanted,
        max_error=float(max_error),
        extension_report=report,
        solve_trace=trace,
        atlas=atlas,
    )


def split_form_to_vertices(form: FaceForm) -> np.ndarray:
    """Vertex curvature targets from a face form: each face value is split
    equally among its three corners (the simplest mass-preserving rule)."""
    mesh = form.mesh
    out = np.zeros(mesh.num_vertices)
    np.add.at(out, mesh.face_array.reshape(-1), np.repeat(form.values / 3.0, 3))
    return out


def prescribe_form(
    mesh: Mesh,
    metric: MetricLengths,
    form: FaceForm,
    options: SolveOptions | None = None,
    seed: float | None = None,
) -> PrescriptionResult:
    """Realize a 2-form on a bounded mesh as the curvature of a metric.

    The form is extended across the caps so its capped integral is exactly
    2*pi*chi, split into vertex targets (one third per corner), solved, and
    restricted. Errors are reported at the interior vertices of the
    original against the split targets.
    """
    if form.mesh is not mesh and form.mesh != mesh:
        raise IndexMismatch("form belongs to a different mesh")
    capped, capped_metric, atlas = cap_all(mesh, metric)
    extended, report = extend_form_gauss_bonnet(form, atlas, seed=seed)
    capped_target = split_form_to_vertices(extended)

    two_pi = 2.0 * math.pi
    if np.any(capped_target >= two_pi):
        worst = int(np.argmax(capped_target))
        raise ConeAngleViolation(
            f"split target at vertex {worst} is {capped_target[worst]:.6g} >= 2*pi"
        )

    factors, solved, trace = solve_prescribed_curvature(
        capped, capped_metric, capped_target, options
    )
    metric_on_m = restrict(solved, atlas)
    achieved = _interior_defects(mesh, metric_on_m)
    wanted = {v: float(capped_target[v]) for v in mesh.interior_vertices}
    if wanted:
        max_error = max(abs(achieved[v] - wanted[v]) for v in wanted)
    else:
        max_error = 0.0
    return PrescriptionResult(
        metric_on_m=metric_on_m,
        achieved=achieved,
        target_on_m=wanted,
        max_error=float(max_error),
        extension_report=report,
        solve_trace=trace,
        atlas=atlas,
    )


def verify(result: PrescriptionResult, mesh: Mesh, tol: float) -> tuple[bool, dict]:
    """Re-derive everything the result claims: the restricted metric is a
    valid metric on ``mesh``, Gauss-Bonnet holds to 1e-9, and the recomputed
    prescription error is within ``tol``."""
    report: dict = {"checks": {}, "notes": []}
    checks = report["checks"]

    metric = result.metric_on_m
    if metric.mesh is not mesh and metric.mesh != mesh:
        report["notes"].append("IndexMismatch: result metric lives on a different mesh")
        checks["mesh_match"] = False
        report["ok"] = False
        return False, report
    checks["mesh_match"] = True

    try:
        metric.validate()
        checks["metric_valid"] = True
    except CurvcapError as exc:
        checks["metric_valid"] = False
        report["notes"].append(f"{type(exc).__name__}: {exc}")
        report["ok"] = False
        return False, report

    gb = gauss_bonnet_check(mesh, metric)
    checks["gauss_bonnet_residual"] = gb.gb_residual
    checks["gauss_bonnet_ok"] = abs(gb.gb_residual) < 1e-9

    achieved = _interior_defects(mesh, metric)
    if set(achieved) != set(result.target_on_m):
        report["notes"].append("IndexMismatch: interior vertices differ from targets")
        checks["targets_cover_interior"] = False
        report["ok"] = False
        return False, report
    checks["targets_cover_interior"] = True
    max_error = max(
        (abs(achieved[v] - result.target_on_m[v]) for v in achieved), default=0.0
    )
    checks["max_error"] = float(max_error)
    checks["max_error_ok"] = max_error <= tol

    ok = checks["metric_valid"] and checks["gauss_bonnet_ok"] and checks["max_error_ok"]
    report["ok"] = bool(ok)
    return bool(ok), report
