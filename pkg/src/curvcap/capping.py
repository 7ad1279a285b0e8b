"""Close a bounded surface by gluing a triangulated disk onto each boundary
loop, and pull data on the closed result back to the original.

Each cap is a two-ring fan: an inner ring of n vertices sitting "under" the
n boundary vertices, plus one apex. The 2n triangles between boundary and
inner ring form the cap's collar (the region extension operators must leave
alone); the n triangles fanning the ring to the apex form its interior (the
region they are free to rescale). A single-fan cap would have no collar,
which is the whole reason for the extra ring.

Original vertices, edges and faces keep their indices in the capped mesh, so
restriction is plain copying.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexMismatch, NoBoundary
from .fields import FaceForm, VertexField
from .mesh import Mesh, MetricLengths

__all__ = ["CapLoop", "CapAtlas", "cap_all", "restrict"]


@dataclass(frozen=True)
class CapLoop:
    """Provenance record for one capped boundary loop.

    ``boundary_vertices`` is the loop in traversal order; ``inner_ring[i]``
    sits under ``boundary_vertices[i]``. Face indices refer to the capped
    mesh.
    """

    boundary_vertices: tuple[int, ...]
    inner_ring_vertices: tuple[int, ...]
    apex_vertex: int
    collar_faces: tuple[int, ...]
    interior_faces: tuple[int, ...]
    radius: float


@dataclass(frozen=True)
class CapAtlas:
    """Map from a capped closed mesh back to the bounded original."""

    original: Mesh
    capped: Mesh
    vertex_map: tuple[int, ...]
    loops: tuple[CapLoop, ...]

    @property
    def collar_faces(self) -> tuple[int, ...]:
        return tuple(f for loop in self.loops for f in loop.collar_faces)

    @property
    def interior_faces(self) -> tuple[int, ...]:
        return tuple(f for loop in self.loops for f in loop.interior_faces)

    @property
    def cap_vertices(self) -> tuple[int, ...]:
        """All vertices owned by caps: boundary rings, inner rings, apexes."""
        out: list[int] = []
        for loop in self.loops:
            out.extend(loop.boundary_vertices)
            out.extend(loop.inner_ring_vertices)
            out.append(loop.apex_vertex)
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "vertex_map": list(self.vertex_map),
            "loops": [
                {
                    "boundary_vertices": list(lp.boundary_vertices),
                    "inner_ring_vertices": list(lp.inner_ring_vertices),
                    "apex_vertex": lp.apex_vertex,
                    "collar_faces": list(lp.collar_faces),
                    "interior_faces": list(lp.interior_faces),
                    "radius": lp.radius,
                }
                for lp in self.loops
            ],
        }


def cap_all(mesh: Mesh, metric: MetricLengths) -> tuple[Mesh, MetricLengths, CapAtlas]:
    """Glue a disk cap onto every boundary loop.

    Cap metric per loop, with r = the loop's longest boundary edge:
    radial edges (boundary i, ring i) and apex spokes get length r, ring
    edges copy the boundary edge they shadow, and collar diagonals
    (boundary i, ring i+1) get sqrt(r^2 + b^2) for the spanned boundary
    edge length b. Since r >= b > 0 for every spanned edge, all new
    triangles satisfy the strict triangle inequality; the result is
    validated anyway.
    """
    if mesh.is_closed:
        raise NoBoundary("mesh is closed; nothing to cap")
    if metric.mesh is not mesh and metric.mesh != mesh:
        raise IndexMismatch("metric belongs to a different mesh")

    faces: list[tuple[int, int, int]] = list(mesh.faces)
    lengths: dict[tuple[int, int], float] = metric.as_mapping()
    next_vertex = mesh.num_vertices
    loops: list[CapLoop] = []

    for loop in mesh.boundary_loops:
        n = len(loop)
        ring = tuple(range(next_vertex, next_vertex + n))
        apex = next_vertex + n
        next_vertex += n + 1

        r = max(metric.length(loop[i], loop[(i + 1) % n]) for i in range(n))

        collar: list[int] = []
        fan: list[tuple[int, int, int]] = []
        for i in range(n):
            j = (i + 1) % n
            b_i, b_j = loop[i], loop[j]
            r_i, r_j = ring[i], ring[j]
            b = metric.length(b_i, b_j)
            # The loop traverses b_i -> b_j with the surface on the left, so
            # cap faces traverse b_j -> b_i to keep the winding consistent.
            collar.append(len(faces))
            faces.append((b_j, b_i, r_j))
            collar.append(len(faces))
            faces.append((b_i, r_i, r_j))
            fan.append((r_j, r_i, apex))
            lengths[_key(b_i, r_i)] = r
            lengths[_key(r_i, r_j)] = b
            lengths[_key(b_i, r_j)] = float(np.hypot(r, b))
            lengths[_key(r_i, apex)] = r

        interior_idx: list[int] = []
        for f in fan:
            interior_idx.append(len(faces))
            faces.append(f)

        loops.append(
            CapLoop(
                boundary_vertices=tuple(loop),
                inner_ring_vertices=ring,
                apex_vertex=apex,
                collar_faces=tuple(collar),
                interior_faces=tuple(interior_idx),
                radius=float(r),
            )
        )

    capped = Mesh(faces, num_vertices=next_vertex)
    capped_metric = MetricLengths.from_mapping(capped, lengths)
    capped_metric.validate()
    if not capped.is_closed:
        raise AssertionError("capped mesh still has boundary")  # unreachable

    atlas = CapAtlas(
        original=mesh,
        capped=capped,
        vertex_map=tuple(range(mesh.num_vertices)),
        loops=tuple(loops),
    )
    return capped, capped_metric, atlas


def _key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def synthesize_cap_coordinates(coordinates: np.ndarray, atlas: CapAtlas) -> np.ndarray:
    """Placeholder 3D positions for cap vertices, for viewing output only.

    The apex sits at the boundary-loop centroid offset along the loop's
    average (Newell) normal by the cap radius; inner-ring vertices sit at
    the midpoints between their boundary vertex and the apex. These
    positions are not isometric to the cap metric; the authoritative metric
    is the edge-length sidecar.
    """
    coords = np.asarray(coordinates, dtype=float)
    if coords.shape != (atlas.original.num_vertices, 3):
        raise IndexMismatch(
            f"expected {atlas.original.num_vertices} coordinate rows, "
            f"got {coords.shape}"
        )
    out = np.zeros((atlas.capped.num_vertices, 3))
    out[: len(coords)] = coords
    for loop in atlas.loops:
        ring = coords[list(loop.boundary_vertices)]
        centroid = ring.mean(axis=0)
        normal = np.zeros(3)
        n = len(ring)
        for i in range(n):
            normal += np.cross(ring[i], ring[(i + 1) % n])
        norm = np.linalg.norm(normal)
        normal = normal / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
        apex = centroid + loop.radius * normal
        out[loop.apex_vertex] = apex
        for bv, rv in zip(loop.boundary_vertices, loop.inner_ring_vertices):
            out[rv] = 0.5 * (coords[bv] + apex)
    return out


def restrict(capped_data, atlas: CapAtlas):
    """Pull metric lengths, a vertex field, or a face form on the capped mesh
    back to the original mesh (plain copying; caps never relabel original
    simplices)."""
    mesh = atlas.capped
    data_mesh = capped_data.mesh
    if data_mesh is not mesh and data_mesh != mesh:
        raise IndexMismatch("data is not indexed on this atlas's capped mesh")

    orig = atlas.original
    if isinstance(capped_data, MetricLengths):
        values = np.empty(orig.num_edges)
        for idx, (i, j) in enumerate(orig.edges):
            values[idx] = capped_data.values[mesh.edge_index(i, j)]
        return MetricLengths(orig, values)
    if isinstance(capped_data, VertexField):
        return VertexField(orig, capped_data.values[np.asarray(atlas.vertex_map)])
    if isinstance(capped_data, FaceForm):
        return FaceForm(orig, capped_data.values[: orig.num_faces])
    raise TypeError(f"cannot restrict {type(capped_data).__name__}")
