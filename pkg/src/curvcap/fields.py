"""Discrete 2-forms, vertex functions, and their extensions across caps.

A FaceForm stores, per face, the integral of a 2-form over that face, so the
discrete integral of the form is just the sum of face values. Extensions
come in two flavors:

* prescribed integral: keep the form on the original surface and on each
  cap's collar, and rescale the cap interiors by a single factor so the
  total hits a prescribed number. The collar is never rescaled, which is
  what makes the extension an extension.
* sign condition: extend a vertex function so the closed-surface
  solvability sign condition holds for the capped Euler characteristic
  (positive somewhere / negative somewhere / changes sign or vanishes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import IndexMismatch, ZeroInteriorMass
from .mesh import Mesh

if TYPE_CHECKING:
    from .capping import CapAtlas

__all__ = [
    "FaceForm",
    "VertexField",
    "ExtensionReport",
    "integrate",
    "prescribed_integral_scale",
    "extend_form_prescribed_integral",
    "extend_form_gauss_bonnet",
    "extend_field_sign_condition",
    "sign_condition_holds",
    "default_seed",
]


class _MeshIndexed:
    """Shared plumbing for per-simplex value arrays."""

    _size_attr = ""

    def __init__(self, mesh: Mesh, values):
        values = np.asarray(values, dtype=float)
        expected = getattr(mesh, self._size_attr)
        if values.shape != (expected,):
            raise IndexMismatch(
                f"{type(self).__name__} needs {expected} values for this mesh, "
                f"got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"{type(self).__name__} values must be finite")
        values = values.copy()
        values.setflags(write=False)
        self.mesh = mesh
        self.values = values

    @classmethod
    def constant(cls, mesh: Mesh, value: float):
        expected = getattr(mesh, cls._size_attr)
        return cls(mesh, np.full(expected, float(value)))

    def __len__(self) -> int:
        return len(self.values)


class FaceForm(_MeshIndexed):
    """One real number per face: the integral of a 2-form over that face."""

    _size_attr = "num_faces"


class VertexField(_MeshIndexed):
    """One real number per vertex."""

    _size_attr = "num_vertices"


@dataclass(frozen=True)
class ExtensionReport:
    """Bookkeeping of one prescribed-integral extension, cap-level.

    ``target_total`` is the mass the caps must contribute (the prescribed
    total minus what the original surface already carries); ``collar_sum``
    is the seed mass frozen on the collars; ``interior_sum`` the seeded
    interior mass before scaling. Then
    ``achieved_total = collar_sum + scale * interior_sum`` exactly.
    """

    target_total: float
    collar_sum: float
    interior_sum: float
    scale: float
    achieved_total: float

    def to_json_dict(self) -> dict:
        return {
            "target_total": self.target_total,
            "collar_sum": self.collar_sum,
            "interior_sum": self.interior_sum,
            "scale": self.scale,
            "achieved_total": self.achieved_total,
        }


def integrate(form: FaceForm) -> float:
    """Integral of the form over its whole mesh (sum of face values)."""
    return float(form.values.sum())


def prescribed_integral_scale(cap_target: float, collar_sum: float, interior_sum: float) -> float:
    """Factor the cap interiors must be scaled by so the caps carry
    ``cap_target`` total mass while the collars stay untouched."""
    if interior_sum == 0.0:
        raise ZeroInteriorMass(
            "cap interior mass is zero; supply a nonzero seed so the "
            "interior can be rescaled"
        )
    return (cap_target - collar_sum) / interior_sum


def default_seed(form_on_m: FaceForm) -> float:
    """Seed for cap extensions: the mean value of original faces adjacent to
    the boundary (those containing a boundary edge), or 1.0 if that mean is
    exactly zero. Deterministic and rarely zero, which keeps
    ZeroInteriorMass an opt-in error."""
    faces = _boundary_adjacent_faces(form_on_m.mesh)
    mean = float(form_on_m.values[faces].mean()) if faces else 0.0
    return 1.0 if mean == 0.0 else mean


def extend_form_prescribed_integral(
    form_on_m: FaceForm,
    atlas: "CapAtlas",
    total: float,
    seed: float | None = None,
) -> tuple[FaceForm, ExtensionReport]:
    """Extend a form across the caps so it integrates to ``total``.

    Original faces keep their values. Collar faces receive the seed value
    and are never rescaled; interior faces receive seed * scale with the
    single scale that makes the capped integral come out right. The seed
    defaults to the mean value of original faces adjacent to the boundary
    (1.0 when that mean vanishes); a zero seed raises ZeroInteriorMass.
    """
    _check_on_original(form_on_m, atlas)
    if seed is None:
        seed = default_seed(form_on_m)
    seed = float(seed)

    n_collar = len(atlas.collar_faces)
    n_interior = len(atlas.interior_faces)
    collar_sum = seed * n_collar
    interior_sum = seed * n_interior
    cap_target = float(total) - integrate(form_on_m)
    scale = prescribed_integral_scale(cap_target, collar_sum, interior_sum)

    values = np.empty(atlas.capped.num_faces)
    values[: atlas.original.num_faces] = form_on_m.values
    values[list(atlas.collar_faces)] = seed
    values[list(atlas.interior_faces)] = seed * scale
    extended = FaceForm(atlas.capped, values)

    achieved = float(
        values[list(atlas.collar_faces)].sum() + values[list(atlas.interior_faces)].sum()
    )
    report = ExtensionReport(
        target_total=cap_target,
        collar_sum=collar_sum,
        interior_sum=interior_sum,
        scale=scale,
        achieved_total=achieved,
    )
    return extended, report


def extend_form_gauss_bonnet(
    form_on_m: FaceForm,
    atlas: "CapAtlas",
    seed: float | None = None,
) -> tuple[FaceForm, ExtensionReport]:
    """Extend so the capped integral equals 2*pi*chi of the capped mesh,
    removing the closed-surface obstruction for the solver."""
    total = 2.0 * math.pi * atlas.capped.euler_characteristic
    return extend_form_prescribed_integral(form_on_m, atlas, total, seed=seed)


def sign_condition_holds(values: np.ndarray, chi: int) -> bool:
    """Closed-surface solvability sign condition for curvature functions:
    chi > 0 needs a positive value, chi < 0 a negative one, chi = 0 either a
    sign change or the zero function."""
    vmax = float(np.max(values))
    vmin = float(np.min(values))
    if chi > 0:
        return vmax > 0.0
    if chi < 0:
        return vmin < 0.0
    return (vmax > 0.0 and vmin < 0.0) or (vmax == 0.0 and vmin == 0.0)


def extend_field_sign_condition(field_on_m: VertexField, atlas: "CapAtlas") -> VertexField:
    """Extend a vertex function across the caps so the extension satisfies
    the sign condition for the capped Euler characteristic.

    Original vertices keep their values and inner-ring vertices copy the
    boundary vertex above them, so the extension agrees with the original
    near the boundary. Each apex first tries the mean of its ring; only if
    the sign condition still fails are the apexes overridden with a value
    of the needed sign (never touching any original vertex).
    """
    if field_on_m.mesh is not atlas.original and field_on_m.mesh != atlas.original:
        raise IndexMismatch("field is not indexed on this atlas's original mesh")

    chi = atlas.capped.euler_characteristic
    values = np.empty(atlas.capped.num_vertices)
    values[: atlas.original.num_vertices] = field_on_m.values
    for loop in atlas.loops:
        ring_vals = field_on_m.values[list(loop.boundary_vertices)]
        values[list(loop.inner_ring_vertices)] = ring_vals
        values[loop.apex_vertex] = ring_vals.mean()

    if not sign_condition_holds(values, chi):
        base = max(1.0, 2.0 * float(np.abs(field_on_m.values).max()))
        if chi > 0:
            apex_value = base
        elif chi < 0:
            apex_value = -base
        else:
            # chi = 0 and the field is one-signed and not identically zero:
            # flip sign at the apexes so the extension changes sign.
            apex_value = -base if float(field_on_m.values.max()) > 0.0 else base
        for loop in atlas.loops:
            values[loop.apex_vertex] = apex_value

    return VertexField(atlas.capped, values)


def _check_on_original(form: FaceForm, atlas: "CapAtlas") -> None:
    if form.mesh is not atlas.original and form.mesh != atlas.original:
        raise IndexMismatch("form is not indexed on this atlas's original mesh")


def _boundary_adjacent_faces(mesh: Mesh) -> list[int]:
    """Faces of a bounded mesh that contain at least one boundary edge."""
    out = set()
    for idx in range(mesh.num_edges):
        fis = mesh.edge_face_indices(idx)
        if len(fis) == 1:
            out.add(fis[0])
    return sorted(out)
