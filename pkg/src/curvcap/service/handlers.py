"""Pure request -> response functions behind the HTTP endpoints.

The CLI calls these directly in its default in-process mode; the FastAPI
app wraps them with HTTP error mapping. They raise the library's domain
errors and never touch the filesystem.
"""

from __future__ import annotations

import numpy as np

from .. import capping, curvature, fields, pipeline, solver
from ..errors import IndexMismatch
from ..mesh import Mesh, MetricLengths, load_mesh
from . import schemas as sc

__all__ = [
    "mesh_info",
    "gauss_bonnet",
    "cap",
    "extend_form",
    "extend_field",
    "solve",
    "prescribe_function",
    "prescribe_form",
]


def _build_mesh(payload: sc.MeshPayload) -> tuple[Mesh, MetricLengths, np.ndarray | None]:
    lengths = None
    if payload.lengths is not None:
        lengths = {(i, j): L for i, j, L in payload.lengths}
    coords = np.asarray(payload.coordinates, dtype=float) if payload.coordinates else None
    mesh, metric = load_mesh(payload.faces, lengths=lengths, coordinates=coords)
    return mesh, metric, coords


def _mesh_payload(mesh: Mesh, metric: MetricLengths, coords: np.ndarray | None) -> sc.MeshPayload:
    return sc.MeshPayload(
        faces=[tuple(f) for f in mesh.faces],
        coordinates=[tuple(c) for c in coords] if coords is not None else None,
        lengths=[
            (i, j, float(L)) for (i, j), L in zip(mesh.edges, metric.values)
        ],
    )


def _form_on(mesh: Mesh, spec: sc.FormSpec) -> fields.FaceForm:
    if spec.constant is not None:
        return fields.FaceForm.constant(mesh, spec.constant)
    if len(spec.face_values) != mesh.num_faces:
        raise IndexMismatch(
            f"form has {len(spec.face_values)} values, mesh has {mesh.num_faces} faces"
        )
    return fields.FaceForm(mesh, spec.face_values)


def _field_on(mesh: Mesh, spec: sc.FieldSpec) -> fields.VertexField:
    if spec.constant is not None:
        return fields.VertexField.constant(mesh, spec.constant)
    if len(spec.vertex_values) != mesh.num_vertices:
        raise IndexMismatch(
            f"field has {len(spec.vertex_values)} values, mesh has "
            f"{mesh.num_vertices} vertices"
        )
    return fields.VertexField(mesh, spec.vertex_values)


def _solve_options(settings: sc.SolveSettings) -> solver.SolveOptions:
    return solver.SolveOptions(tol=settings.tol, max_iter=settings.max_iter)


def _atlas_model(atlas: capping.CapAtlas) -> sc.CapAtlasModel:
    return sc.CapAtlasModel(
        vertex_map=list(atlas.vertex_map),
        loops=[
            sc.CapLoopModel(
                boundary_vertices=list(lp.boundary_vertices),
                inner_ring_vertices=list(lp.inner_ring_vertices),
                apex_vertex=lp.apex_vertex,
                collar_faces=list(lp.collar_faces),
                interior_faces=list(lp.interior_faces),
                radius=lp.radius,
            )
            for lp in atlas.loops
        ],
    )


def _report_model(report: fields.ExtensionReport) -> sc.ExtensionReportModel:
    return sc.ExtensionReportModel(**report.to_json_dict())


def _trace_models(trace: solver.SolveTrace) -> list[sc.TraceRecordModel]:
    return [sc.TraceRecordModel(**r.to_json_dict()) for r in trace.records]


def mesh_info(request: sc.MeshRequest) -> sc.MeshInfoResponse:
    mesh, _, _ = _build_mesh(request.mesh)
    return sc.MeshInfoResponse(
        num_vertices=mesh.num_vertices,
        num_edges=mesh.num_edges,
        num_faces=mesh.num_faces,
        euler_characteristic=mesh.euler_characteristic,
        boundary_loop_count=mesh.boundary_loop_count,
        boundary_loops=[list(loop) for loop in mesh.boundary_loops],
    )


def gauss_bonnet(request: sc.MeshRequest) -> sc.GaussBonnetResponse:
    mesh, metric, _ = _build_mesh(request.mesh)
    report = curvature.gauss_bonnet_check(mesh, metric)
    return sc.GaussBonnetResponse(
        interior_defects=sorted(report.interior_defects.items()),
        boundary_turning=sorted(report.boundary_turning.items()),
        total=report.total,
        gb_target=report.gb_target,
        gb_residual=report.gb_residual,
        loop_turning_totals=report.loop_turning_totals(mesh),
    )


def cap(request: sc.MeshRequest) -> sc.CapResponse:
    mesh, metric, coords = _build_mesh(request.mesh)
    capped, capped_metric, atlas = capping.cap_all(mesh, metric)
    capped_coords = (
        capping.synthesize_cap_coordinates(coords, atlas) if coords is not None else None
    )
    return sc.CapResponse(
        capped=_mesh_payload(capped, capped_metric, capped_coords),
        atlas=_atlas_model(atlas),
    )


def extend_form(request: sc.ExtendFormRequest) -> sc.ExtendFormResponse:
    mesh, metric, coords = _build_mesh(request.mesh)
    form = _form_on(mesh, request.form)
    capped, capped_metric, atlas = capping.cap_all(mesh, metric)
    if request.total is None:
        extended, report = fields.extend_form_gauss_bonnet(form, atlas, seed=request.seed)
    else:
        extended, report = fields.extend_form_prescribed_integral(
            form, atlas, request.total, seed=request.seed
        )
    capped_coords = (
        capping.synthesize_cap_coordinates(coords, atlas) if coords is not None else None
    )
    return sc.ExtendFormResponse(
        capped=_mesh_payload(capped, capped_metric, capped_coords),
        atlas=_atlas_model(atlas),
        face_values=[float(x) for x in extended.values],
        report=_report_model(report),
    )


def extend_field(request: sc.ExtendFieldRequest) -> sc.ExtendFieldResponse:
    mesh, metric, coords = _build_mesh(request.mesh)
    field = _field_on(mesh, request.field)
    capped, capped_metric, atlas = capping.cap_all(mesh, metric)
    extended = fields.extend_field_sign_condition(field, atlas)
    chi = capped.euler_characteristic
    apexes = [lp.apex_vertex for lp in atlas.loops]
    means = [
        float(np.mean([field.values[v] for v in lp.boundary_vertices]))
        for lp in atlas.loops
    ]
    overridden = any(
        extended.values[a] != m for a, m in zip(apexes, means)
    )
    capped_coords = (
        capping.synthesize_cap_coordinates(coords, atlas) if coords is not None else None
    )
    return sc.ExtendFieldResponse(
        capped=_mesh_payload(capped, capped_metric, capped_coords),
        atlas=_atlas_model(atlas),
        vertex_values=[float(x) for x in extended.values],
        summary=sc.SignConditionSummary(
            chi_capped=chi,
            holds=fields.sign_condition_holds(extended.values, chi),
            apex_overridden=overridden,
            min_value=float(extended.values.min()),
            max_value=float(extended.values.max()),
        ),
    )


def solve(request: sc.SolveRequest) -> sc.SolveResponse:
    mesh, metric, _ = _build_mesh(request.mesh)
    target = _field_on(mesh, request.target)
    factors, lengths, trace = solver.solve_prescribed_curvature(
        mesh, metric, target, _solve_options(request.settings)
    )
    return sc.SolveResponse(
        factors=[float(x) for x in factors.u],
        lengths=[(i, j, float(L)) for (i, j), L in zip(mesh.edges, lengths.values)],
        residual=trace.records[-1].residual,
        iterations=trace.iterations,
        termination=trace.termination,
        trace=_trace_models(trace) if request.settings.trace else None,
    )


def _prescribe_response(result: pipeline.PrescriptionResult, want_trace: bool) -> sc.PrescribeResponse:
    mesh = result.metric_on_m.mesh
    achieved: list[float | None] = [None] * mesh.num_vertices
    target: list[float | None] = [None] * mesh.num_vertices
    for v, x in result.achieved.items():
        achieved[v] = float(x)
    for v, x in result.target_on_m.items():
        target[v] = float(x)
    if isinstance(result.extension_report, fields.ExtensionReport):
        report_model = _report_model(result.extension_report)
    else:
        report_model = sc.CapDeficitModel(**result.extension_report.to_json_dict())
    return sc.PrescribeResponse(
        lengths=[
            (i, j, float(L))
            for (i, j), L in zip(mesh.edges, result.metric_on_m.values)
        ],
        achieved=achieved,
        target=target,
        max_error=result.max_error,
        extension_report=report_model,
        iterations=result.solve_trace.iterations,
        termination=result.solve_trace.termination,
        trace=_trace_models(result.solve_trace) if want_trace else None,
    )


def prescribe_function(request: sc.PrescribeFunctionRequest) -> sc.PrescribeResponse:
    mesh, metric, _ = _build_mesh(request.mesh)
    if request.target.constant is not None:
        target = {v: request.target.constant for v in mesh.interior_vertices}
    else:
        field = _field_on(mesh, request.target)
        target = {v: float(field.values[v]) for v in mesh.interior_vertices}
    result = pipeline.prescribe_function(
        mesh, metric, target, _solve_options(request.settings)
    )
    return _prescribe_response(result, request.settings.trace)


def prescribe_form(request: sc.PrescribeFormRequest) -> sc.PrescribeResponse:
    mesh, metric, _ = _build_mesh(request.mesh)
    form = _form_on(mesh, request.form)
    result = pipeline.prescribe_form(
        mesh, metric, form, _solve_options(request.settings), seed=request.seed
    )
    return _prescribe_response(result, request.settings.trace)
