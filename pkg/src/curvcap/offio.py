"""OFF mesh files and the JSON edge-length sidecar.

OFF carries connectivity plus viewing coordinates; it cannot carry an
intrinsic metric, so authoritative lengths always travel in a sidecar of the
form {"lengths": [[i, j, L], ...]} with i < j and L > 0. When no sidecar is
given, lengths fall back to Euclidean distances of the OFF coordinates.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidFace, ValidationError
from .jsonutil import canonical_dumps
from .mesh import Mesh, MetricLengths, load_mesh

__all__ = [
    "read_off",
    "write_off",
    "read_lengths_sidecar",
    "lengths_sidecar_dict",
    "write_lengths_sidecar",
    "load_mesh_files",
]


class OffFormatError(ValidationError):
    """The OFF file does not parse."""


def _significant_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def read_off(path) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Parse an ASCII OFF file into (coordinates, faces)."""
    text = Path(path).read_text()
    lines = _significant_lines(text)

    try:
        lineno, header = next(lines)
    except StopIteration:
        raise OffFormatError(f"{path}: empty file") from None
    if header.upper() == "OFF":
        try:
            lineno, header = next(lines)
        except StopIteration:
            raise OffFormatError(f"{path}: missing counts line") from None
    parts = header.split()
    if len(parts) != 3:
        raise OffFormatError(f"{path}:{lineno}: counts line must be 'V F E'")
    try:
        nv, nf, _ne = (int(p) for p in parts)
    except ValueError:
        raise OffFormatError(f"{path}:{lineno}: counts line must be 'V F E'") from None

    coords = np.empty((nv, 3))
    for k in range(nv):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise OffFormatError(f"{path}: expected {nv} vertex rows, got {k}") from None
        cols = line.split()
        if len(cols) < 3:
            raise OffFormatError(f"{path}:{lineno}: vertex row needs 3 coordinates")
        try:
            coords[k] = [float(c) for c in cols[:3]]
        except ValueError:
            raise OffFormatError(f"{path}:{lineno}: bad coordinate") from None

    faces: list[tuple[int, int, int]] = []
    for k in range(nf):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise OffFormatError(f"{path}: expected {nf} face rows, got {k}") from None
        cols = line.split()
        try:
            arity = int(cols[0])
        except (ValueError, IndexError):
            raise OffFormatError(f"{path}:{lineno}: bad face row") from None
        if arity != 3:
            raise InvalidFace(
                f"{path}:{lineno}: face with {arity} vertices; only triangles "
                f"are supported"
            )
        if len(cols) < 4:
            raise OffFormatError(f"{path}:{lineno}: face row needs 3 indices")
        try:
            i, j, l = (int(c) for c in cols[1:4])
        except ValueError:
            raise OffFormatError(f"{path}:{lineno}: bad face index") from None
        faces.append((i, j, l))
    return coords, faces


def write_off(path, coordinates: np.ndarray, faces) -> None:
    coords = np.asarray(coordinates, dtype=float)
    rows = ["OFF", f"{len(coords)} {len(faces)} 0"]
    for x, y, z in coords:
        rows.append(f"{format(x, '.17g')} {format(y, '.17g')} {format(z, '.17g')}")
    for f in faces:
        rows.append("3 " + " ".join(str(int(v)) for v in f))
    Path(path).write_text("\n".join(rows) + "\n")


def read_lengths_sidecar(path) -> dict[tuple[int, int], float]:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict) or "lengths" not in payload:
        raise ValidationError(f"{path}: expected an object with a 'lengths' key")
    out: dict[tuple[int, int], float] = {}
    for row in payload["lengths"]:
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise ValidationError(f"{path}: each lengths row must be [i, j, L]")
        i, j, L = row
        if not isinstance(i, int) or not isinstance(j, int) or not i < j:
            raise ValidationError(f"{path}: row {row}: need integer indices i < j")
        L = float(L)
        if not L > 0:
            raise ValidationError(f"{path}: row {row}: length must be positive")
        out[(i, j)] = L
    return out


def lengths_sidecar_dict(metric: MetricLengths) -> dict:
    return {
        "lengths": [
            [i, j, float(L)] for (i, j), L in zip(metric.mesh.edges, metric.values)
        ]
    }


def write_lengths_sidecar(path, metric: MetricLengths) -> None:
    Path(path).write_text(canonical_dumps(lengths_sidecar_dict(metric)))


def load_mesh_files(mesh_path, lengths_path=None) -> tuple[Mesh, MetricLengths, np.ndarray]:
    """Load an OFF file plus optional sidecar; returns (mesh, metric, coords).

    Sidecar lengths are authoritative when present; OFF coordinates are kept
    only for viewing output.
    """
    coords, faces = read_off(mesh_path)
    lengths = read_lengths_sidecar(lengths_path) if lengths_path else None
    mesh, metric = load_mesh(faces, lengths=lengths, coordinates=coords)
    return mesh, metric, coords
