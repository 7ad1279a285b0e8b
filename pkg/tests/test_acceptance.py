"""Acceptance suite: one test per criterion, each printing a pass/fail line
(run with ``pytest tests/test_acceptance.py -s`` to see them). Tolerances are
pinned here and nowhere else."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from curvcap import (
    FaceForm,
    VertexField,
    cap_all,
    conformal_lengths,
    extend_field_sign_condition,
    extend_form_gauss_bonnet,
    extend_form_prescribed_integral,
    fixtures,
    gauss_bonnet_check,
    integrate,
    prescribe_form,
    prescribe_function,
    prescription_energy,
    sign_condition_holds,
    solve_prescribed_curvature,
)
from curvcap.curvature import all_angle_defects, vertex_angle_sums
from curvcap.pipeline import split_form_to_vertices
from curvcap.solver import cotan_laplacian

from conftest import perturbed_metric
from test_solver import fd_descent_oracle


def criterion(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {number}] {name}: {status}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def meshes():
    return {name: fixtures.load(name) for name in fixtures.FIXTURE_NAMES}


@pytest.fixture(scope="module")
def atlases(meshes):
    return {
        name: cap_all(*meshes[name]) for name in fixtures.BOUNDED_FIXTURES
    }


def test_criterion_1_gauss_bonnet_exactness(meshes):
    """|sum defects + sum turning - 2*pi*chi| < 1e-9 for 1000 random valid
    metrics on each fixture."""
    rng = np.random.default_rng(101)
    worst = 0.0
    for name, (mesh, metric) in meshes.items():
        target = 2 * math.pi * mesh.euler_characteristic
        bd = mesh.boundary_vertex_mask
        n_int = int((~bd).sum())
        for _ in range(1000):
            m = perturbed_metric(mesh, metric, rng)
            sums = vertex_angle_sums(mesh, m)
            total = 2 * math.pi * n_int + math.pi * int(bd.sum()) - sums.sum()
            worst = max(worst, abs(total - target))
    criterion(1, "discrete Gauss-Bonnet exactness", worst < 1e-9, f"worst residual {worst:.3e}")


def test_criterion_2_prescribed_integral_extension(meshes, atlases):
    """1000 random (form, a, seed != 0) trials per capped fixture: the capped
    integral hits a within 1e-10 relative and collar values do not depend
    on a."""
    rng = np.random.default_rng(102)
    worst_rel = 0.0
    collar_independent = True
    for name in fixtures.BOUNDED_FIXTURES:
        mesh, _ = meshes[name]
        _, _, atlas = atlases[name]
        collar = list(atlas.collar_faces)
        for _ in range(1000):
            form = FaceForm(mesh, rng.normal(scale=2.0, size=mesh.num_faces))
            a = float(rng.uniform(-20.0, 20.0))
            seed = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 3.0))
            ext, _ = extend_form_prescribed_integral(form, atlas, a, seed)
            worst_rel = max(worst_rel, abs(integrate(ext) - a) / max(1.0, abs(a)))
            other, _ = extend_form_prescribed_integral(form, atlas, a + 7.5, seed)
            if not np.array_equal(ext.values[collar], other.values[collar]):
                collar_independent = False
    criterion(
        2,
        "prescribed-integral extension",
        worst_rel <= 1e-10 and collar_independent,
        f"worst relative gap {worst_rel:.3e}, collar independent: {collar_independent}",
    )


def test_criterion_3_gauss_bonnet_extension(meshes, atlases):
    """extend_form_gauss_bonnet always integrates to 2*pi*chi(capped) within
    1e-10."""
    rng = np.random.default_rng(103)
    worst = 0.0
    for name in fixtures.BOUNDED_FIXTURES:
        mesh, _ = meshes[name]
        _, _, atlas = atlases[name]
        target = 2 * math.pi * atlas.capped.euler_characteristic
        for _ in range(100):
            form = FaceForm(mesh, rng.normal(scale=3.0, size=mesh.num_faces))
            seed = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0))
            ext, _ = extend_form_gauss_bonnet(form, atlas, seed=seed)
            worst = max(worst, abs(integrate(ext) - target))
    criterion(3, "Gauss-Bonnet-targeted extension", worst <= 1e-10, f"worst gap {worst:.3e}")


def test_criterion_4_sign_condition_extension(meshes, atlases):
    """The extended field satisfies the sign predicate for chi(capped) for
    constant fields -1, +1, 0 and 100 random fields per bounded fixture."""
    rng = np.random.default_rng(104)
    all_hold = True
    for name in fixtures.BOUNDED_FIXTURES:
        mesh, _ = meshes[name]
        _, _, atlas = atlases[name]
        chi = atlas.capped.euler_characteristic
        cases = [
            VertexField.constant(mesh, -1.0),
            VertexField.constant(mesh, 1.0),
            VertexField.constant(mesh, 0.0),
        ] + [
            VertexField(mesh, rng.normal(scale=2.0, size=mesh.num_vertices))
            for _ in range(100)
        ]
        for field in cases:
            ext = extend_field_sign_condition(field, atlas)
            if not sign_condition_holds(ext.values, chi):
                all_hold = False
    criterion(4, "sign-condition extension", all_hold)


def test_criterion_5_chi_additivity(meshes, atlases):
    """Capping b boundary loops raises chi by exactly b."""
    ok = True
    details = []
    for name in fixtures.BOUNDED_FIXTURES:
        mesh, _ = meshes[name]
        capped = atlases[name][0]
        b = mesh.boundary_loop_count
        got = capped.euler_characteristic - mesh.euler_characteristic
        details.append(f"{name}: +{got} for {b} loops")
        if got != b:
            ok = False
    criterion(5, "Euler characteristic additivity", ok, "; ".join(details))


def test_criterion_6a_uniform_icosahedron(meshes):
    mesh, metric = meshes["icosahedron"]
    _, _, trace = solve_prescribed_curvature(mesh, metric, np.full(12, math.pi / 3))
    ok = trace.iterations <= 1 and trace.records[-1].residual < 1e-12
    criterion(
        6,
        "solver 6a: uniform icosahedron",
        ok,
        f"{trace.iterations} iterations, residual {trace.records[-1].residual:.3e}",
    )


def test_criterion_6b_dense_oracle(meshes):
    mesh, metric = meshes["tetrahedron"]
    target = np.array([math.pi + 0.1, math.pi - 0.1, math.pi, math.pi])
    factors, _, _ = solve_prescribed_curvature(mesh, metric, target)
    oracle = fd_descent_oracle(mesh, metric, target)
    gap = float(np.abs(factors.u - (oracle - oracle.mean())).max())
    criterion(6, "solver 6b: finite-difference descent oracle", gap <= 1e-6, f"u gap {gap:.3e}")


def test_criterion_6c_derivative_checks(meshes):
    """Gradient and Jacobian finite-difference checks at 1e-5 relative on
    every closed mesh with at most 12 vertices (both closed fixtures plus the
    capped triangle)."""
    rng = np.random.default_rng(106)
    small = {
        "tetrahedron": meshes["tetrahedron"],
        "icosahedron": meshes["icosahedron"],
    }
    capped, capped_metric, _ = cap_all(*meshes["triangle"])
    small["capped_triangle"] = (capped, capped_metric)

    ok = True
    details = []
    for name, (mesh, metric) in small.items():
        n = mesh.num_vertices
        target = np.full(n, 2 * math.pi * mesh.euler_characteristic / n)
        u = rng.uniform(-0.1, 0.1, n)
        u -= u.mean()
        h = 1e-6
        # gradient of the energy vs curvature residual
        d = rng.normal(size=n)
        d /= np.abs(d).max()
        fd = (
            prescription_energy(mesh, metric, u + h * d, target)
            - prescription_energy(mesh, metric, u - h * d, target)
        ) / (2 * h)
        K = all_angle_defects(mesh, conformal_lengths(metric, u))
        grad_gap = abs(fd - float((K - target) @ d)) / max(1.0, abs(fd))
        # Jacobian of the curvature map vs the cotan matrix, and symmetry
        J = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            Kp = all_angle_defects(mesh, conformal_lengths(metric, u + e))
            Km = all_angle_defects(mesh, conformal_lengths(metric, u - e))
            J[:, j] = (Kp - Km) / (2 * h)
        H = cotan_laplacian(mesh, conformal_lengths(metric, u)).toarray()
        scale = float(np.abs(H).max())
        jac_gap = float(np.abs(J - H).max()) / scale
        sym_gap = float(np.abs(J - J.T).max())
        details.append(f"{name}: grad {grad_gap:.1e}, jac {jac_gap:.1e}, sym {sym_gap:.1e}")
        if grad_gap > 1e-5 or jac_gap > 1e-5 or sym_gap > 1e-8:
            ok = False
    criterion(6, "solver 6c: derivative checks", ok, "; ".join(details))


def test_criterion_7_function_prescription(meshes):
    """200 random interior targets in (-pi, pi) on the hexagonal fan all
    converge with max_error <= 1e-8 after restriction: no sign or integral
    precondition on the bounded surface."""
    mesh, metric = meshes["hex_fan"]
    rng = np.random.default_rng(107)
    worst = 0.0
    for t in rng.uniform(-math.pi, math.pi, 200):
        result = prescribe_function(mesh, metric, {0: float(t)})
        worst = max(worst, result.max_error)
    criterion(7, "function prescription on the fan disk", worst <= 1e-8, f"worst error {worst:.3e}")


def test_criterion_8_form_prescription(meshes):
    """prescribe_form with the zero form and with 100 random bounded forms:
    achieved interior defects match the split targets within 1e-8."""
    mesh, metric = meshes["hex_fan"]
    rng = np.random.default_rng(108)
    forms = [FaceForm.constant(mesh, 0.0)] + [
        FaceForm(mesh, rng.uniform(-0.5, 0.5, mesh.num_faces)) for _ in range(100)
    ]
    worst = 0.0
    for form in forms:
        result = prescribe_form(mesh, metric, form)
        split = split_form_to_vertices(form)
        for v in mesh.interior_vertices:
            worst = max(worst, abs(result.achieved[v] - split[v]))
        worst = max(worst, result.max_error)
    criterion(8, "form prescription on the fan disk", worst <= 1e-8, f"worst error {worst:.3e}")


def test_criterion_9_cli_determinism(tmp_path):
    """Identical CLI invocations produce byte-identical JSON output."""
    off_dir = tmp_path / "offs"
    fixtures.write_data(off_dir)
    runs = {
        "prescribe": [
            "prescribe-fn", "--mesh", str(off_dir / "hex_fan.off"), "--const", "0.9",
        ],
        "check-gb": ["check-gb", "--mesh", str(off_dir / "genus2_hole.off"),
                     "--lengths", str(off_dir / "genus2_hole.lengths.json")],
    }
    ok = True
    for label, argv in runs.items():
        outputs = []
        for k in range(2):
            out = tmp_path / f"{label}-{k}.json"
            proc = subprocess.run(
                [sys.executable, "-m", "curvcap", *argv, "--out", str(out)],
                capture_output=True,
            )
            assert proc.returncode == 0, proc.stderr
            outputs.append(out.read_bytes())
        if outputs[0] != outputs[1]:
            ok = False
    criterion(9, "CLI determinism", ok)


def test_every_converged_metric_passes_gauss_bonnet(meshes):
    """Cross-cutting guard from the solver contract: realized metrics stay
    Gauss-Bonnet-exact."""
    mesh, metric = meshes["hex_fan"]
    rng = np.random.default_rng(109)
    for t in rng.uniform(-2.0, 2.0, 10):
        result = prescribe_function(mesh, metric, {0: float(t)})
        report = gauss_bonnet_check(mesh, result.metric_on_m)
        assert abs(report.gb_residual) < 1e-9
