"""Discrete curvature measures and the Gauss-Bonnet identity.

Gaussian curvature concentrates at interior vertices as the angle defect
2*pi - (angle sum); geodesic curvature of the boundary concentrates at
boundary vertices as the turning angle pi - (angle sum). Their grand total
equals 2*pi*chi for every valid metric, not just approximately: every corner
angle is counted exactly once, so the identity is combinatorial. That makes
the residual of this identity the toolkit's cheapest end-to-end check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryVertex, InteriorVertex
from .mesh import Mesh, MetricLengths, corner_angles

__all__ = [
    "CurvatureReport",
    "vertex_angle_sums",
    "angle_defect",
    "turning_angle",
    "all_angle_defects",
    "gauss_bonnet_check",
]


@dataclass(frozen=True)
class CurvatureReport:
    """Everything Gauss-Bonnet sees: defects, turning angles, their total,
    and the gap to the topological target 2*pi*chi."""

    interior_defects: dict[int, float]
    boundary_turning: dict[int, float]
    total: float
    gb_target: float
    gb_residual: float

    def loop_turning_totals(self, mesh: Mesh) -> list[float]:
        return [
            float(sum(self.boundary_turning[v] for v in loop))
            for loop in mesh.boundary_loops
        ]

    def to_json_dict(self) -> dict:
        return {
            "interior_defects": [[v, x] for v, x in sorted(self.interior_defects.items())],
            "boundary_turning": [[v, x] for v, x in sorted(self.boundary_turning.items())],
            "total": self.total,
            "gb_target": self.gb_target,
            "gb_residual": self.gb_residual,
        }


def vertex_angle_sums(mesh: Mesh, metric: MetricLengths) -> np.ndarray:
    """Sum of incident corner angles at every vertex."""
    angles = corner_angles(mesh, metric)
    sums = np.zeros(mesh.num_vertices)
    np.add.at(sums, mesh.face_array.reshape(-1), angles.reshape(-1))
    return sums


def angle_defect(mesh: Mesh, metric: MetricLengths, vertex: int) -> float:
    """2*pi minus the angle sum at an interior vertex."""
    if mesh.is_boundary_vertex(vertex):
        raise BoundaryVertex(f"vertex {vertex} lies on the boundary")
    return float(2.0 * np.pi - vertex_angle_sums(mesh, metric)[vertex])


def turning_angle(mesh: Mesh, metric: MetricLengths, vertex: int) -> float:
    """pi minus the angle sum at a boundary vertex."""
    if not mesh.is_boundary_vertex(vertex):
        raise InteriorVertex(f"vertex {vertex} is interior")
    return float(np.pi - vertex_angle_sums(mesh, metric)[vertex])


def all_angle_defects(mesh: Mesh, metric: MetricLengths) -> np.ndarray:
    """Angle defects at every vertex of a closed mesh."""
    if not mesh.is_closed:
        raise InteriorVertex(
            "all_angle_defects needs a closed mesh; bounded meshes mix "
            "defects and turning angles"
        )
    return 2.0 * np.pi - vertex_angle_sums(mesh, metric)


def gauss_bonnet_check(mesh: Mesh, metric: MetricLengths) -> CurvatureReport:
    """Compute all defects and turning angles and compare their total with
    2*pi*chi. The residual is floating-point rounding, nothing else."""
    sums = vertex_angle_sums(mesh, metric)
    bd = mesh.boundary_vertex_mask
    interior = {int(v): float(2.0 * np.pi - sums[v]) for v in np.flatnonzero(~bd)}
    turning = {int(v): float(np.pi - sums[v]) for v in np.flatnonzero(bd)}
    total = float(sum(interior.values()) + sum(turning.values()))
    target = 2.0 * np.pi * mesh.euler_characteristic
    return CurvatureReport(
        interior_defects=interior,
        boundary_turning=turning,
        total=total,
        gb_target=target,
        gb_residual=total - target,
    )
