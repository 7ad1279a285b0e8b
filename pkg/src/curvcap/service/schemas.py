"""Request/response models for the HTTP service.

These models are the wire format: the CLI builds the same requests whether
it calls the handlers in-process or POSTs them to a running server, and the
CLI's output files are canonical-JSON dumps of the responses.
"""

from __future__ import annotations

from pydantic import BaseModel, model_validator

Vec3 = tuple[float, float, float]
FaceRow = tuple[int, int, int]
LengthRow = tuple[int, int, float]


class MeshPayload(BaseModel):
    """A mesh on the wire: faces plus lengths and/or viewing coordinates
    (mirrors an OFF file with its edge-length sidecar)."""

    faces: list[FaceRow]
    coordinates: list[Vec3] | None = None
    lengths: list[LengthRow] | None = None

    @model_validator(mode="after")
    def _needs_geometry(self):
        if self.coordinates is None and self.lengths is None:
            raise ValueError("mesh payload needs coordinates or lengths")
        return self


class FormSpec(BaseModel):
    """A face form: explicit per-face values or a constant."""

    face_values: list[float] | None = None
    constant: float | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.face_values is None) == (self.constant is None):
            raise ValueError("give exactly one of face_values or constant")
        return self


class FieldSpec(BaseModel):
    """A vertex field: explicit per-vertex values or a constant."""

    vertex_values: list[float] | None = None
    constant: float | None = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.vertex_values is None) == (self.constant is None):
            raise ValueError("give exactly one of vertex_values or constant")
        return self


class SolveSettings(BaseModel):
    tol: float = 1e-10
    max_iter: int = 50
    trace: bool = False


# -- requests ----------------------------------------------------------------


class MeshRequest(BaseModel):
    mesh: MeshPayload


class ExtendFormRequest(BaseModel):
    mesh: MeshPayload
    form: FormSpec
    total: float | None = None  # None: use the Gauss-Bonnet target 2*pi*chi
    seed: float | None = None


class ExtendFieldRequest(BaseModel):
    mesh: MeshPayload
    field: FieldSpec


class SolveRequest(BaseModel):
    mesh: MeshPayload
    target: FieldSpec
    settings: SolveSettings = SolveSettings()


class PrescribeFunctionRequest(BaseModel):
    mesh: MeshPayload
    target: FieldSpec  # boundary entries of vertex_values are ignored
    settings: SolveSettings = SolveSettings()


class PrescribeFormRequest(BaseModel):
    mesh: MeshPayload
    form: FormSpec
    seed: float | None = None
    settings: SolveSettings = SolveSettings()


# -- responses ---------------------------------------------------------------


class MeshInfoResponse(BaseModel):
    num_vertices: int
    num_edges: int
    num_faces: int
    euler_characteristic: int
    boundary_loop_count: int
    boundary_loops: list[list[int]]


class GaussBonnetResponse(BaseModel):
    interior_defects: list[tuple[int, float]]
    boundary_turning: list[tuple[int, float]]
    total: float
    gb_target: float
    gb_residual: float
    loop_turning_totals: list[float]


class CapLoopModel(BaseModel):
    boundary_vertices: list[int]
    inner_ring_vertices: list[int]
    apex_vertex: int
    collar_faces: list[int]
    interior_faces: list[int]
    radius: float


class CapAtlasModel(BaseModel):
    vertex_map: list[int]
    loops: list[CapLoopModel]


class CapResponse(BaseModel):
    capped: MeshPayload
    atlas: CapAtlasModel


class ExtensionReportModel(BaseModel):
    target_total: float
    collar_sum: float
    interior_sum: float
    scale: float
    achieved_total: float


class ExtendFormResponse(BaseModel):
    capped: MeshPayload
    atlas: CapAtlasModel
    face_values: list[float]
    report: ExtensionReportModel


class SignConditionSummary(BaseModel):
    chi_capped: int
    holds: bool
    apex_overridden: bool
    min_value: float
    max_value: float


class ExtendFieldResponse(BaseModel):
    capped: MeshPayload
    atlas: CapAtlasModel
    vertex_values: list[float]
    summary: SignConditionSummary


class TraceRecordModel(BaseModel):
    iteration: int
    residual: float
    step: float
    energy: float


class SolveResponse(BaseModel):
    factors: list[float]
    lengths: list[LengthRow]
    residual: float
    iterations: int
    termination: str
    trace: list[TraceRecordModel] | None = None


class CapDeficitModel(BaseModel):
    kind: str = "cap_deficit"
    deficit: float
    weights: str
    ring_value: float
    inner_value: float
    apex_value: float
    chi_capped: int


class PrescribeResponse(BaseModel):
    lengths: list[LengthRow]
    achieved: list[float | None]
    target: list[float | None]
    max_error: float
    extension_report: ExtensionReportModel | CapDeficitModel
    iterations: int
    termination: str
    trace: list[TraceRecordModel] | None = None


class ErrorResponse(BaseModel):
    error: str
    message: str
