import math

import numpy as np
import pytest

from curvcap import (
    DegenerateTriangle,
    Disconnected,
    InvalidFace,
    Mesh,
    MetricLengths,
    NonManifoldEdge,
    NonManifoldVertex,
    NonOrientable,
    corner_angle,
    fixtures,
    load_mesh,
)
from curvcap.mesh import corner_angles

from conftest import perturbed_metric

UNIT = {None: None}


def unit_lengths(faces):
    out = {}
    for f in faces:
        for k in range(3):
            i, j = f[k], f[(k + 1) % 3]
            out[(min(i, j), max(i, j))] = 1.0
    return out


class TestLoadMesh:
    def test_tetrahedron_counts(self):
        mesh, _ = fixtures.load("tetrahedron")
        assert (mesh.num_vertices, mesh.num_edges, mesh.num_faces) == (4, 6, 4)
        assert mesh.boundary_loops == ()
        assert mesh.euler_characteristic == 2

    def test_single_triangle_counts(self):
        faces = [(0, 1, 2)]
        mesh, _ = load_mesh(faces, lengths=unit_lengths(faces))
        assert (mesh.num_vertices, mesh.num_edges, mesh.num_faces) == (3, 3, 1)
        assert mesh.boundary_loop_count == 1
        assert len(mesh.boundary_loops[0]) == 3
        assert mesh.euler_characteristic == 1

    def test_annulus(self):
        mesh, _ = fixtures.load("annulus")
        assert mesh.euler_characteristic == 0
        assert mesh.boundary_loop_count == 2

    def test_nonmanifold_edge(self):
        faces = [(0, 1, 2), (3, 0, 1), (4, 1, 0)]
        with pytest.raises(NonManifoldEdge):
            load_mesh(faces, lengths=unit_lengths(faces))

    def test_nonorientable_moebius(self):
        # Minimal Moebius band: the cyclic strip picks up a half twist.
        faces = [(0, 1, 2), (1, 2, 3), (2, 3, 4), (3, 4, 0), (4, 0, 1)]
        with pytest.raises(NonOrientable):
            Mesh(faces)

    def test_inconsistent_winding_is_repaired(self):
        coords, faces, _ = fixtures.build("tetrahedron")
        flipped = list(faces)
        a, b, c = flipped[2]
        flipped[2] = (a, c, b)
        mesh, _ = load_mesh(flipped, coordinates=coords)
        reference, _ = load_mesh(faces, coordinates=coords)
        assert mesh == reference

    def test_disconnected_components(self):
        faces = [(0, 1, 2), (3, 4, 5)]
        with pytest.raises(Disconnected):
            Mesh(faces)

    def test_isolated_vertex(self):
        with pytest.raises(Disconnected):
            Mesh([(0, 1, 2)], num_vertices=4)

    def test_pinched_vertex(self):
        # Two triangle fans sharing only vertex 0.
        faces = [(0, 1, 2), (0, 3, 4)]
        with pytest.raises(NonManifoldVertex):
            Mesh(faces)

    def test_degenerate_lengths_rejected(self):
        with pytest.raises(DegenerateTriangle):
            load_mesh([(0, 1, 2)], lengths={(0, 1): 1.0, (1, 2): 1.0, (0, 2): 2.0})

    def test_repeated_vertex_face(self):
        with pytest.raises(InvalidFace):
            Mesh([(0, 1, 1)])

    def test_duplicate_face(self):
        with pytest.raises(InvalidFace):
            Mesh([(0, 1, 2), (2, 1, 0)])

    def test_needs_some_geometry(self):
        with pytest.raises(InvalidFace):
            load_mesh([(0, 1, 2)])

    def test_lengths_win_over_coordinates(self):
        coords = np.array([[0, 0, 0], [2, 0, 0], [0, 2, 0]], dtype=float)
        _, metric = load_mesh(
            [(0, 1, 2)],
            lengths={(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0},
            coordinates=coords,
        )
        assert metric.length(0, 1) == 1.0


class TestBoundaryLoops:
    def test_closed_mesh_has_none(self, fixture_meshes):
        assert fixture_meshes["icosahedron"][0].boundary_loops == ()

    def test_each_boundary_edge_in_exactly_one_loop(self, fixture_meshes):
        for name in fixtures.BOUNDED_FIXTURES:
            mesh, _ = fixture_meshes[name]
            boundary_edges = {
                mesh.edges[k]
                for k in range(mesh.num_edges)
                if len(mesh.edge_face_indices(k)) == 1
            }
            seen = []
            for loop in mesh.boundary_loops:
                for k in range(len(loop)):
                    i, j = loop[k], loop[(k + 1) % len(loop)]
                    seen.append((min(i, j), max(i, j)))
            assert sorted(seen) == sorted(boundary_edges)
            assert len(seen) == len(set(seen))

    def test_surface_lies_left_of_loop(self, fixture_meshes):
        # The loop direction must be the unmatched face half-edge direction.
        for name in fixtures.BOUNDED_FIXTURES:
            mesh, _ = fixture_meshes[name]
            half_edges = set()
            for (a, b, c) in mesh.faces:
                half_edges.update([(a, b), (b, c), (c, a)])
            for loop in mesh.boundary_loops:
                for k in range(len(loop)):
                    step = (loop[k], loop[(k + 1) % len(loop)])
                    assert step in half_edges
                    assert (step[1], step[0]) not in half_edges


class TestCornerAngles:
    def test_equilateral(self):
        mesh, metric = load_mesh(
            [(0, 1, 2)], lengths={(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0}
        )
        assert corner_angle(mesh, metric, 0, 0) == pytest.approx(math.pi / 3, abs=1e-15)

    def test_pythagorean(self):
        mesh, metric = load_mesh(
            [(0, 1, 2)], lengths={(0, 1): 3.0, (1, 2): 4.0, (0, 2): 5.0}
        )
        # angle opposite the hypotenuse (0,2) sits at vertex 1
        assert corner_angle(mesh, metric, 0, 1) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_degenerate_corner(self):
        mesh = Mesh([(0, 1, 2)])
        metric = MetricLengths.from_mapping(
            mesh, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 2.0}
        )
        with pytest.raises(DegenerateTriangle):
            corner_angle(mesh, metric, 0, 1)
        with pytest.raises(DegenerateTriangle):
            corner_angles(mesh, metric)

    def test_vertex_must_belong_to_face(self, fixture_meshes):
        mesh, metric = fixture_meshes["tetrahedron"]
        with pytest.raises(IndexError):
            corner_angle(mesh, metric, 0, 3)

    def test_angles_sum_to_pi(self, fixture_meshes):
        rng = np.random.default_rng(11)
        for name, (mesh, metric) in fixture_meshes.items():
            for _ in range(20):
                m = perturbed_metric(mesh, metric, rng)
                sums = corner_angles(mesh, m).sum(axis=1)
                assert np.abs(sums - math.pi).max() < 1e-12, name


class TestMetricLengths:
    def test_validate_rejects_nonpositive(self, fixture_meshes):
        mesh, metric = fixture_meshes["tetrahedron"]
        values = metric.values.copy()
        values[0] = -1.0
        bad = MetricLengths(mesh, values)
        assert not bad.is_valid()
        with pytest.raises(DegenerateTriangle):
            bad.validate()

    def test_scaled(self, fixture_meshes):
        mesh, metric = fixture_meshes["tetrahedron"]
        assert np.allclose(metric.scaled(3.0).values, 3.0 * metric.values)

    def test_wrong_size(self, fixture_meshes):
        mesh, _ = fixture_meshes["tetrahedron"]
        with pytest.raises(IndexError):
            MetricLengths(mesh, np.ones(5))
