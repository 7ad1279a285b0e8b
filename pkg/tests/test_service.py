import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from curvcap import fixtures
from curvcap.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def mesh_payload(name, with_lengths=False):
    coords, faces, lengths = fixtures.build(name)
    payload = {"faces": [list(f) for f in faces], "coordinates": [list(c) for c in coords]}
    if with_lengths or lengths is not None:
        mesh, metric = fixtures.load(name)
        payload["lengths"] = [
            [i, j, float(L)] for (i, j), L in zip(mesh.edges, metric.values)
        ]
    return payload


class TestInfo:
    def test_tetrahedron(self, client):
        resp = client.post("/info", json={"mesh": mesh_payload("tetrahedron")})
        assert resp.status_code == 200
        body = resp.json()
        assert body["num_vertices"] == 4
        assert body["num_edges"] == 6
        assert body["num_faces"] == 4
        assert body["euler_characteristic"] == 2
        assert body["boundary_loop_count"] == 0

    def test_annulus_loops(self, client):
        resp = client.post("/info", json={"mesh": mesh_payload("annulus")})
        assert resp.json()["boundary_loop_count"] == 2

    def test_malformed_payload_is_422(self, client):
        resp = client.post("/info", json={"mesh": {"faces": []}})
        assert resp.status_code == 422

    def test_bad_mesh_is_400_with_error_name(self, client):
        payload = {
            "faces": [[0, 1, 2], [3, 0, 1], [4, 1, 0]],
            "coordinates": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]],
        }
        resp = client.post("/info", json={"mesh": payload})
        assert resp.status_code == 400
        assert resp.json()["error"] == "NonManifoldEdge"


class TestGaussBonnet:
    def test_residual_is_tiny(self, client):
        resp = client.post("/gauss-bonnet", json={"mesh": mesh_payload("genus2_hole")})
        body = resp.json()
        assert abs(body["gb_residual"]) < 1e-9
        assert body["gb_target"] == pytest.approx(-6 * math.pi)
        assert len(body["loop_turning_totals"]) == 1


class TestCap:
    def test_capped_triangle(self, client):
        resp = client.post("/cap", json={"mesh": mesh_payload("triangle")})
        body = resp.json()
        assert len(body["capped"]["faces"]) == 10
        assert len(body["capped"]["coordinates"]) == 7
        assert len(body["atlas"]["loops"]) == 1
        loop = body["atlas"]["loops"][0]
        assert len(loop["collar_faces"]) == 6
        assert len(loop["interior_faces"]) == 3

    def test_closed_mesh_is_400(self, client):
        resp = client.post("/cap", json={"mesh": mesh_payload("icosahedron")})
        assert resp.status_code == 400
        assert resp.json()["error"] == "NoBoundary"


class TestExtend:
    def test_form_gauss_bonnet_default(self, client):
        resp = client.post(
            "/extend/form",
            json={"mesh": mesh_payload("annulus"), "form": {"constant": 0.25}},
        )
        body = resp.json()
        total = sum(body["face_values"])
        assert total == pytest.approx(4 * math.pi, abs=1e-9)

    def test_form_prescribed_total(self, client):
        resp = client.post(
            "/extend/form",
            json={
                "mesh": mesh_payload("triangle"),
                "form": {"constant": 0.0},
                "total": 7.5,
                "seed": 1.0,
            },
        )
        body = resp.json()
        assert sum(body["face_values"]) == pytest.approx(7.5, abs=1e-10)
        assert body["report"]["target_total"] == pytest.approx(7.5)

    def test_zero_seed_is_400(self, client):
        resp = client.post(
            "/extend/form",
            json={
                "mesh": mesh_payload("triangle"),
                "form": {"constant": 0.0},
                "seed": 0.0,
            },
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "ZeroInteriorMass"

    def test_field_sign_condition(self, client):
        resp = client.post(
            "/extend/field",
            json={"mesh": mesh_payload("triangle"), "field": {"constant": -1.0}},
        )
        body = resp.json()
        assert body["summary"]["chi_capped"] == 2
        assert body["summary"]["holds"] is True
        assert body["summary"]["apex_overridden"] is True
        assert max(body["vertex_values"]) > 0

    def test_field_values_wrong_size_is_400(self, client):
        resp = client.post(
            "/extend/field",
            json={
                "mesh": mesh_payload("triangle"),
                "field": {"vertex_values": [1.0, 2.0]},
            },
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "IndexMismatch"


class TestSolve:
    def test_icosahedron_uniform(self, client):
        resp = client.post(
            "/solve",
            json={
                "mesh": mesh_payload("icosahedron"),
                "target": {"constant": math.pi / 3},
            },
        )
        body = resp.json()
        assert body["termination"] == "converged"
        assert body["iterations"] <= 1
        assert abs(body["residual"]) < 1e-12
        assert len(body["factors"]) == 12
        assert body["trace"] is None

    def test_trace_included_on_request(self, client):
        resp = client.post(
            "/solve",
            json={
                "mesh": mesh_payload("icosahedron"),
                "target": {"constant": math.pi / 3},
                "settings": {"trace": True},
            },
        )
        body = resp.json()
        assert body["trace"] is not None
        assert body["trace"][0]["iteration"] == 0

    def test_sum_mismatch_is_400(self, client):
        resp = client.post(
            "/solve",
            json={"mesh": mesh_payload("icosahedron"), "target": {"constant": 1.0}},
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "TargetSumMismatch"

    def test_solver_failure_is_409(self, client):
        resp = client.post(
            "/prescribe/function",
            json={
                "mesh": mesh_payload("hex_fan"),
                "target": {"constant": 0.3},
                "settings": {"max_iter": 1},
            },
        )
        assert resp.status_code == 409
        assert resp.json()["error"] == "MaxIterExceeded"


class TestPrescribe:
    def test_function(self, client):
        resp = client.post(
            "/prescribe/function",
            json={"mesh": mesh_payload("hex_fan"), "target": {"constant": 0.3}},
        )
        body = resp.json()
        assert body["max_error"] <= 1e-8
        assert body["achieved"][0] == pytest.approx(0.3, abs=1e-8)
        assert body["achieved"][1] is None  # boundary vertex
        assert body["extension_report"]["kind"] == "cap_deficit"
        assert len(body["lengths"]) == 12

    def test_form(self, client):
        resp = client.post(
            "/prescribe/form",
            json={"mesh": mesh_payload("hex_fan"), "form": {"constant": 0.1}},
        )
        body = resp.json()
        assert body["max_error"] <= 1e-8
        assert body["target"][0] == pytest.approx(0.2, abs=1e-12)
        assert "scale" in body["extension_report"]

    def test_function_with_explicit_values(self, client):
        values = [0.5] + [0.0] * 6  # boundary entries ignored
        resp = client.post(
            "/prescribe/function",
            json={
                "mesh": mesh_payload("hex_fan"),
                "target": {"vertex_values": values},
            },
        )
        assert resp.json()["achieved"][0] == pytest.approx(0.5, abs=1e-8)

    def test_sidecar_lengths_are_authoritative(self, client):
        # Conformal solves are scale-equivariant, so doubling the sidecar
        # metric must double the solved metric exactly. If the sidecar were
        # ignored in favor of coordinates, the two responses would be equal.
        base = client.post(
            "/prescribe/function",
            json={"mesh": mesh_payload("hex_fan"), "target": {"constant": 0.0}},
        ).json()
        payload = mesh_payload("hex_fan")
        mesh, metric = fixtures.load("hex_fan")
        payload["lengths"] = [
            [i, j, 2.0 * float(L)] for (i, j), L in zip(mesh.edges, metric.values)
        ]
        doubled = client.post(
            "/prescribe/function",
            json={"mesh": payload, "target": {"constant": 0.0}},
        ).json()
        got = np.array([row[2] for row in doubled["lengths"]])
        expected = 2.0 * np.array([row[2] for row in base["lengths"]])
        assert np.allclose(got, expected, rtol=1e-14)
