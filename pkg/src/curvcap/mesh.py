"""Oriented triangulated surfaces with boundary and their intrinsic metrics.

A Mesh is pure connectivity: faces as ordered vertex triples with globally
consistent winding. Geometry lives in a separate MetricLengths value (one
positive length per edge), so one mesh can carry many metrics. Both are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateTriangle,
    Disconnected,
    IndexMismatch,
    InvalidFace,
    NonManifoldEdge,
    NonManifoldVertex,
    NonOrientable,
)

__all__ = [
    "Mesh",
    "MetricLengths",
    "load_mesh",
    "corner_angle",
    "corner_angles",
]

# Clamp margin for the arccos argument: beyond this the metric is treated as
# broken input rather than a rounding artifact.
ANGLE_ARG_TOL = 1e-9


class Mesh:
    """Connectivity of an oriented triangulated 2-manifold, possibly with
    boundary.

    Construction validates everything the rest of the library relies on:
    every edge lies in one or two faces, vertex stars are single fans, the
    surface is connected, and face windings are made globally consistent
    (the winding of face 0 is kept; other faces are flipped as needed).
    Boundary edges are chained into simple loops, oriented so the surface
    lies to the left of the direction of traversal.
    """

    def __init__(self, faces: Sequence[Sequence[int]], num_vertices: int | None = None):
        face_list = [tuple(int(v) for v in f) for f in faces]
        if not face_list:
            raise InvalidFace("face list is empty")
        for f in face_list:
            if len(f) != 3:
                raise InvalidFace(f"face {f} does not have exactly 3 vertices")
            if len(set(f)) != 3:
                raise InvalidFace(f"face {f} repeats a vertex")
            if min(f) < 0:
                raise InvalidFace(f"face {f} has a negative vertex index")
        seen = set()
        for f in face_list:
            key = frozenset(f)
            if key in seen:
                raise InvalidFace(f"duplicate face on vertices {sorted(key)}")
            seen.add(key)

        max_index = max(max(f) for f in face_list)
        if num_vertices is None:
            num_vertices = max_index + 1
        elif max_index >= num_vertices:
            raise InvalidFace(
                f"face index {max_index} exceeds num_vertices={num_vertices}"
            )
        self._num_vertices = int(num_vertices)

        used = np.zeros(self._num_vertices, dtype=bool)
        for f in face_list:
            for v in f:
                used[v] = True
        if not used.all():
            lone = int(np.flatnonzero(~used)[0])
            raise Disconnected(f"vertex {lone} belongs to no face")

        # Edge -> incident face indices, before orientation fixing.
        edge_faces: dict[tuple[int, int], list[int]] = {}
        for fi, (a, b, c) in enumerate(face_list):
            for u, v in ((a, b), (b, c), (c, a)):
                key = (u, v) if u < v else (v, u)
                lst = edge_faces.setdefault(key, [])
                if len(lst) == 2:
                    raise NonManifoldEdge(f"edge {key} lies in more than 2 faces")
                lst.append(fi)

        face_list, n_components = self._orient(face_list, edge_faces)
        self._faces = tuple(face_list)

        self._edges = tuple(sorted(edge_faces))
        self._edge_index = {e: i for i, e in enumerate(self._edges)}
        self._edge_faces = tuple(tuple(edge_faces[e]) for e in self._edges)

        # After consistent orientation, each interior edge is traversed once
        # in each direction and each boundary edge exactly once.
        directed: dict[tuple[int, int], int] = {}
        for fi, (a, b, c) in enumerate(self._faces):
            for u, v in ((a, b), (b, c), (c, a)):
                if (u, v) in directed:
                    raise NonOrientable(
                        f"directed edge {(u, v)} appears twice after orientation"
                    )
                directed[(u, v)] = fi

        # Fan check first: a vertex shared by two face components is a pinch
        # (NonManifoldVertex), not a disconnection.
        self._check_vertex_fans()
        if n_components > 1:
            raise Disconnected(
                f"the surface has {n_components} connected components"
            )
        self._boundary_loops = self._trace_boundary_loops(directed)

        bd = np.zeros(self._num_vertices, dtype=bool)
        for loop in self._boundary_loops:
            for v in loop:
                bd[v] = True
        self._boundary_mask = bd
        self._boundary_mask.setflags(write=False)

        # Per-face edge indices, corner-aligned: slot c holds the edge
        # opposite corner c (so the edges incident to corner c sit in the
        # other two slots). Used by every vectorized angle computation.
        fe = np.empty((len(self._faces), 3), dtype=np.int64)
        for fi, (a, b, c) in enumerate(self._faces):
            fe[fi, 0] = self._edge_index[(b, c) if b < c else (c, b)]
            fe[fi, 1] = self._edge_index[(a, c) if a < c else (c, a)]
            fe[fi, 2] = self._edge_index[(a, b) if a < b else (b, a)]
        fe.setflags(write=False)
        self._face_edges = fe

        fa = np.asarray(self._faces, dtype=np.int64)
        fa.setflags(write=False)
        self._face_array = fa

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def _orient(
        face_list: list[tuple[int, int, int]],
        edge_faces: Mapping[tuple[int, int], list[int]],
    ) -> tuple[list[tuple[int, int, int]], int]:
        """Flip faces until all windings agree; reject non-orientable input.

        BFS over the face adjacency graph, restarted per component (each
        component keeps its seed face's winding). Returns the repaired faces
        and the number of components; the caller decides what multiple
        components mean once vertex stars have been checked.
        """

        def directed_edges(f):
            a, b, c = f
            return ((a, b), (b, c), (c, a))

        n = len(face_list)
        out = list(face_list)
        state = [0] * n  # 0 unvisited, 1 kept, -1 flipped
        n_components = 0
        for seed in range(n):
            if state[seed]:
                continue
            n_components += 1
            state[seed] = 1
            queue = [seed]
            while queue:
                fi = queue.pop()
                for u, v in directed_edges(out[fi]):
                    key = (u, v) if u < v else (v, u)
                    for gi in edge_faces[key]:
                        if gi == fi:
                            continue
                        # Consistent orientation: neighbor traverses (v, u).
                        same_dir = (u, v) in directed_edges(out[gi])
                        if state[gi] == 0:
                            if same_dir:
                                a, b, c = out[gi]
                                out[gi] = (a, c, b)
                                state[gi] = -1
                            else:
                                state[gi] = 1
                            queue.append(gi)
                        elif same_dir:
                            raise NonOrientable(
                                f"faces {fi} and {gi} cannot be wound consistently"
                            )
        return out, n_components

    def _check_vertex_fans(self) -> None:
        """Every vertex star must be a single open or closed fan."""
        incident: list[list[int]] = [[] for _ in range(self._num_vertices)]
        for fi, f in enumerate(self._faces):
            for v in f:
                incident[v].append(fi)
        for v, fis in enumerate(incident):
            # Walk the fan: in face (v, a, b) (cyclically ordered so v is
            # first), the outgoing neighbor is a and incoming is b.
            nxt = {}
            for fi in fis:
                f = self._faces[fi]
                i = f.index(v)
                a, b = f[(i + 1) % 3], f[(i + 2) % 3]
                nxt[a] = b
            start_candidates = set(nxt) - set(nxt.values())
            if len(start_candidates) > 1:
                raise NonManifoldVertex(
                    f"vertex {v} has {len(start_candidates)} fan components"
                )
            start = start_candidates.pop() if start_candidates else next(iter(nxt))
            count, cur = 0, start
            while cur in nxt and count <= len(fis):
                cur = nxt.pop(cur)
                count += 1
            if nxt:
                raise NonManifoldVertex(f"vertex {v} star is not a single fan")

    def _trace_boundary_loops(
        self, directed: Mapping[tuple[int, int], int]
    ) -> tuple[tuple[int, ...], ...]:
        """Chain unmatched half-edges into loops (surface to the left)."""
        boundary_next: dict[int, int] = {}
        for (u, v) in directed:
            if (v, u) not in directed:
                if u in boundary_next:
                    raise NonManifoldVertex(
                        f"vertex {u} lies on more than one boundary arc"
                    )
                boundary_next[u] = v
        loops = []
        remaining = dict(boundary_next)
        while remaining:
            start = min(remaining)
            loop = [start]
            cur = remaining.pop(start)
            while cur != start:
                loop.append(cur)
                cur = remaining.pop(cur)
            if len(loop) < 3:
                raise NonManifoldEdge(
                    f"boundary loop {loop} has fewer than 3 vertices"
                )
            loops.append(tuple(loop))
        return tuple(sorted(loops))

    # -- queries ---------------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self._num_vertices

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def num_faces(self) -> int:
        return len(self._faces)

    @property
    def faces(self) -> tuple[tuple[int, int, int], ...]:
        return self._faces

    @property
    def face_array(self) -> np.ndarray:
        """Faces as an immutable (F, 3) int array."""
        return self._face_array

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges as sorted (i, j) pairs with i < j, in index order."""
        return self._edges

    @property
    def face_edges(self) -> np.ndarray:
        """(F, 3) edge indices; slot c is the edge opposite corner c."""
        return self._face_edges

    def edge_index(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        try:
            return self._edge_index[key]
        except KeyError:
            raise KeyError(f"no edge between vertices {i} and {j}") from None

    def edge_face_indices(self, edge_idx: int) -> tuple[int, ...]:
        return self._edge_faces[edge_idx]

    @property
    def euler_characteristic(self) -> int:
        return self._num_vertices - len(self._edges) + len(self._faces)

    @property
    def boundary_loops(self) -> tuple[tuple[int, ...], ...]:
        """Cyclic vertex sequences, one per boundary component, oriented so
        the surface lies to the left; each starts at its smallest vertex."""
        return self._boundary_loops

    @property
    def boundary_loop_count(self) -> int:
        return len(self._boundary_loops)

    @property
    def is_closed(self) -> bool:
        return not self._boundary_loops

    def is_boundary_vertex(self, v: int) -> bool:
        return bool(self._boundary_mask[v])

    @property
    def boundary_vertex_mask(self) -> np.ndarray:
        return self._boundary_mask

    @property
    def interior_vertices(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(~self._boundary_mask))

    @property
    def boundary_vertices(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.flatnonzero(self._boundary_mask))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self._num_vertices == other._num_vertices
            and self._faces == other._faces
        )

    def __hash__(self):
        return hash((self._num_vertices, self._faces))

    def __repr__(self) -> str:
        return (
            f"Mesh(V={self.num_vertices}, E={self.num_edges}, "
            f"F={self.num_faces}, boundary_loops={self.boundary_loop_count})"
        )


class MetricLengths:
    """One length per edge of a mesh.

    A *valid* metric has every length positive and every face satisfying the
    strict triangle inequality (the latter implies the former). Validity is
    checked by :meth:`validate` / :meth:`is_valid` rather than on
    construction: conformal rescaling legitimately produces candidates that
    violate it, and the solver wants to see and reject those rather than
    never receive the value.
    """

    def __init__(self, mesh: Mesh, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        if values.shape != (mesh.num_edges,):
            raise IndexError(
                f"expected {mesh.num_edges} edge lengths, got shape {values.shape}"
            )
        values = values.copy()
        values.setflags(write=False)
        self._mesh = mesh
        self._values = values

    @classmethod
    def from_mapping(cls, mesh: Mesh, lengths: Mapping[tuple[int, int], float]) -> "MetricLengths":
        values = np.empty(mesh.num_edges)
        seen = np.zeros(mesh.num_edges, dtype=bool)
        for (i, j), L in lengths.items():
            try:
                idx = mesh.edge_index(int(i), int(j))
            except KeyError:
                raise IndexMismatch(
                    f"length given for ({i}, {j}), which is not an edge of the mesh"
                ) from None
            values[idx] = float(L)
            seen[idx] = True
        if not seen.all():
            missing = mesh.edges[int(np.flatnonzero(~seen)[0])]
            raise IndexMismatch(f"no length given for edge {missing}")
        return cls(mesh, values)

    @classmethod
    def from_coordinates(cls, mesh: Mesh, coordinates: np.ndarray) -> "MetricLengths":
        coords = np.asarray(coordinates, dtype=float)
        if coords.ndim != 2 or coords.shape[0] != mesh.num_vertices:
            raise IndexError(
                f"expected {mesh.num_vertices} coordinate rows, got {coords.shape}"
            )
        e = np.asarray(mesh.edges, dtype=np.int64)
        values = np.linalg.norm(coords[e[:, 0]] - coords[e[:, 1]], axis=1)
        return cls(mesh, values)

    @property
    def mesh(self) -> Mesh:
        return self._mesh

    @property
    def values(self) -> np.ndarray:
        """Lengths aligned with ``mesh.edges``."""
        return self._values

    def length(self, i: int, j: int) -> float:
        return float(self._values[self._mesh.edge_index(i, j)])

    def scaled(self, factor: float) -> "MetricLengths":
        return MetricLengths(self._mesh, self._values * factor)

    def triangle_inequality_slack(self) -> np.ndarray:
        """Per-face minimum of (sum of two sides) - (third side)."""
        L = self._values[self._mesh.face_edges]  # (F, 3), slot c opposite corner c
        s = L.sum(axis=1, keepdims=True)
        return (s - 2 * L).min(axis=1)

    def is_valid(self) -> bool:
        if not np.all(np.isfinite(self._values)):
            return False
        return bool(self.triangle_inequality_slack().min() > 0)

    def validate(self) -> None:
        if not np.all(np.isfinite(self._values)):
            raise DegenerateTriangle("edge lengths must be finite")
        slack = self.triangle_inequality_slack()
        bad = np.flatnonzero(slack <= 0)
        if bad.size:
            fi = int(bad[0])
            raise DegenerateTriangle(
                f"face {fi} {self._mesh.faces[fi]} fails the strict triangle "
                f"inequality (slack {slack[fi]:.3e})"
            )

    def as_mapping(self) -> dict[tuple[int, int], float]:
        return {e: float(v) for e, v in zip(self._mesh.edges, self._values)}

    def __repr__(self) -> str:
        return f"MetricLengths(edges={len(self._values)})"


def load_mesh(
    faces: Iterable[Sequence[int]],
    lengths: Mapping[tuple[int, int], float] | None = None,
    coordinates: np.ndarray | None = None,
    num_vertices: int | None = None,
) -> tuple[Mesh, MetricLengths]:
    """Build and validate a mesh plus its metric.

    Lengths win when both sources are given; coordinates are only a way to
    derive initial lengths, never part of the mesh.
    """
    if lengths is None and coordinates is None:
        raise InvalidFace("need either an edge-length map or vertex coordinates")
    if num_vertices is None and coordinates is not None:
        num_vertices = len(coordinates)
    mesh = Mesh(faces, num_vertices=num_vertices)
    if lengths is not None:
        metric = MetricLengths.from_mapping(mesh, lengths)
    else:
        metric = MetricLengths.from_coordinates(mesh, coordinates)
    metric.validate()
    # Angle computation doubles as a numerical-degeneracy check.
    corner_angles(mesh, metric)
    return mesh, metric


def corner_angles(mesh: Mesh, metric: MetricLengths) -> np.ndarray:
    """All corner angles as an (F, 3) array, slot c = angle at corner c.

    Raises DegenerateTriangle when any arccos argument reaches +-1: a valid
    strict metric keeps every angle strictly inside (0, pi), so hitting the
    ends means the metric is (numerically) degenerate. Nothing is clamped
    silently; degeneracies must surface, e.g. to fail a solver line search.
    """
    if metric.mesh is not mesh and metric.mesh != mesh:
        raise IndexMismatch("metric belongs to a different mesh")
    L = metric.values[mesh.face_edges]  # slot c holds the side opposite corner c
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    # cos of the angle at corner 0 (between sides b and c, opposite a), etc.
    cos0 = (b * b + c * c - a * a) / (2 * b * c)
    cos1 = (a * a + c * c - b * b) / (2 * a * c)
    cos2 = (a * a + b * b - c * c) / (2 * a * b)
    cos = np.stack([cos0, cos1, cos2], axis=1)
    amax = np.abs(cos).max()
    if amax >= 1.0:
        fi = int(np.flatnonzero((np.abs(cos) >= 1.0).any(axis=1))[0])
        beyond = amax > 1.0 + ANGLE_ARG_TOL
        raise DegenerateTriangle(
            f"face {fi} {mesh.faces[fi]} has a degenerate corner "
            f"(|arccos argument| = {amax:.17g}"
            + (", beyond rounding tolerance)" if beyond else ", within rounding of 1)")
        )
    return np.arccos(cos)


def corner_angle(mesh: Mesh, metric: MetricLengths, face: int, vertex: int) -> float:
    """Interior angle of one face at one of its vertices, in (0, pi)."""
    f = mesh.faces[face]
    if vertex not in f:
        raise IndexError(f"vertex {vertex} is not a corner of face {face} {f}")
    corner = f.index(vertex)
    L = metric.values[mesh.face_edges[face]]
    opp = L[corner]
    s1, s2 = (L[i] for i in range(3) if i != corner)
    arg = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2)
    if abs(arg) >= 1.0:
        beyond = abs(arg) > 1.0 + ANGLE_ARG_TOL
        raise DegenerateTriangle(
            f"corner at vertex {vertex} of face {face} is degenerate "
            f"(arccos argument {arg:.17g}"
            + (", beyond rounding tolerance)" if beyond else ")")
        )
    return float(np.arccos(arg))
