"""Bundled desk-scale test meshes.

Six fixtures cover the topology matrix the test suite needs: two closed
(sphere-like) meshes, a disk, a disk with an interior vertex, an annulus
with two boundary loops, and a genus-2 surface with one hole (negative
Euler characteristic). Builders are deterministic; the shipped .off files
are their frozen output and a test asserts they still match.

The genus-2 fixture is two 4x4 grid tori glued along a removed triangle,
with one more face removed for the hole. Its shipped coordinates are for
viewing; the canonical metric is the unit-length sidecar (every face
equilateral), which is what :func:`load` returns.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

import numpy as np

from ..mesh import Mesh, MetricLengths, load_mesh
from ..offio import write_lengths_sidecar, write_off

__all__ = [
    "FIXTURE_NAMES",
    "BOUNDED_FIXTURES",
    "CLOSED_FIXTURES",
    "build",
    "load",
    "fixture_path",
    "sidecar_path",
    "write_data",
]

FIXTURE_NAMES = (
    "tetrahedron",
    "icosahedron",
    "triangle",
    "hex_fan",
    "annulus",
    "genus2_hole",
)
CLOSED_FIXTURES = ("tetrahedron", "icosahedron")
BOUNDED_FIXTURES = ("triangle", "hex_fan", "annulus", "genus2_hole")

_PHI = (1.0 + math.sqrt(5.0)) / 2.0


def _tetrahedron():
    s = 1.0 / (2.0 * math.sqrt(2.0))  # unit edges
    coords = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
    ) * s
    faces = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    return coords, faces, None


def _icosahedron():
    p = _PHI
    coords = 0.5 * np.array(
        [
            [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
            [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
            [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
        ],
        dtype=float,
    )  # unit edges
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return coords, faces, None


def _triangle():
    coords = np.array(
        [[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3.0) / 2.0, 0]], dtype=float
    )
    return coords, [(0, 1, 2)], None


def _hex_fan():
    coords = [[0.0, 0.0, 0.0]]
    for k in range(6):
        a = math.pi * k / 3.0
        coords.append([math.cos(a), math.sin(a), 0.0])
    faces = [(0, 1 + k, 1 + (k + 1) % 6) for k in range(6)]
    return np.array(coords), faces, None


def _annulus():
    coords = []
    for radius in (2.0, 1.0):
        for k in range(6):
            a = math.pi * k / 3.0
            coords.append([radius * math.cos(a), radius * math.sin(a), 0.0])
    faces = []
    for k in range(6):
        j = (k + 1) % 6
        faces.append((k, j, 6 + j))
        faces.append((k, 6 + j, 6 + k))
    return np.array(coords), faces, None


def _grid_torus(n: int, center_x: float):
    """n x n grid torus: vertex (a, b) -> n*a + b, standard embedding."""
    big_r, small_r = 1.5, 0.5
    coords = np.empty((n * n, 3))
    for a in range(n):
        for b in range(n):
            th = 2.0 * math.pi * a / n
            ph = 2.0 * math.pi * b / n
            w = big_r + small_r * math.cos(ph)
            coords[n * a + b] = (
                w * math.cos(th) + center_x,
                w * math.sin(th),
                small_r * math.sin(ph),
            )
    faces = []
    for a in range(n):
        for b in range(n):
            v00 = n * a + b
            v10 = n * ((a + 1) % n) + b
            v01 = n * a + (b + 1) % n
            v11 = n * ((a + 1) % n) + (b + 1) % n
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return coords, faces


def _genus2_hole():
    n = 4
    coords_a, faces_a = _grid_torus(n, -2.5)
    coords_b, faces_b = _grid_torus(n, +2.5)

    glue_a = faces_a.pop(0)  # (p, q, r) of torus A
    glue_b = faces_b.pop(0)  # (p', q', r') of torus B

    # Orientation-reversing identification: p'->p, q'->r, r'->q, so the two
    # boundary triangles cancel and the windings extend. Remaining B
    # vertices are appended after A's.
    p, q, r = glue_a
    pp, qq, rr = glue_b
    ident = {pp: p, qq: r, rr: q}
    relabel = {}
    next_id = len(coords_a)
    for v in range(n * n):
        if v in ident:
            relabel[v] = ident[v]
        else:
            relabel[v] = next_id
            next_id += 1

    coords = np.vstack(
        [coords_a, np.zeros((next_id - len(coords_a), 3))]
    )
    for v in range(n * n):
        if v not in ident:
            coords[relabel[v]] = coords_b[v]
    # The glued triangle gets explicit positions on the mid-plane between
    # the tori; the symmetric midpoint choice would collapse q and r onto
    # one point (the tori are translates and the gluing swaps the pair).
    coords[p] = (0.0, 1.2, 0.0)
    coords[r] = (0.0, -0.6, 1.0)
    coords[q] = (0.0, -0.6, -1.0)

    faces = list(faces_a) + [tuple(relabel[v] for v in f) for f in faces_b]

    # Punch the hole far from the junction: first face of quad (2, 2) in B.
    hole_face = tuple(
        relabel[v]
        for v in (n * 2 + 2, n * 3 + 2, n * 3 + 3)
    )
    faces.remove(hole_face)

    unit = {tuple(sorted(e)): 1.0 for f in faces for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))}
    return coords, faces, unit


_BUILDERS = {
    "tetrahedron": _tetrahedron,
    "icosahedron": _icosahedron,
    "triangle": _triangle,
    "hex_fan": _hex_fan,
    "annulus": _annulus,
    "genus2_hole": _genus2_hole,
}


def build(name: str):
    """(coordinates, faces, canonical lengths or None) for a fixture."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}") from None
    return builder()


def load(name: str) -> tuple[Mesh, MetricLengths]:
    """Build a fixture mesh with its canonical metric (no file I/O)."""
    coords, faces, lengths = build(name)
    return load_mesh(faces, lengths=lengths, coordinates=coords)


def fixture_path(name: str) -> Path:
    """Path of the shipped .off file."""
    path = resources.files("curvcap.fixtures") / "data" / f"{name}.off"
    return Path(str(path))


def sidecar_path(name: str) -> Path | None:
    """Path of the shipped lengths sidecar, for fixtures that have one."""
    path = Path(str(resources.files("curvcap.fixtures") / "data" / f"{name}.lengths.json"))
    return path if path.exists() else None


def write_data(dest_dir) -> None:
    """Regenerate the shipped fixture files (used once, and by tests to
    assert the shipped files match the builders)."""
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        coords, faces, lengths = build(name)
        mesh, metric = load_mesh(faces, lengths=lengths, coordinates=coords)
        write_off(dest / f"{name}.off", coords, faces)
        if lengths is not None:
            write_lengths_sidecar(dest / f"{name}.lengths.json", metric)
