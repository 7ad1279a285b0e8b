"""FastAPI application exposing the toolkit over HTTP.

Run with ``uvicorn curvcap.service.app:app``. Domain validation errors map
to 400, solver failures to 409; both carry {"error": <name>, "message": ...}
so thin clients can translate them back to exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import SolverFailure, ValidationError
from . import handlers
from . import schemas as sc

app = FastAPI(
    title="curvcap",
    description=(
        "Prescribe discrete curvature on triangulated surfaces with "
        "boundary: disk capping, form/function extension, conformal Newton "
        "solves, Gauss-Bonnet checks."
    ),
    version="0.1.0",
)


@app.exception_handler(ValidationError)
async def _validation_error(request: Request, exc: ValidationError):
    return JSONResponse(
        status_code=400,
        content=sc.ErrorResponse(error=type(exc).__name__, message=str(exc)).model_dump(),
    )


@app.exception_handler(SolverFailure)
async def _solver_failure(request: Request, exc: SolverFailure):
    return JSONResponse(
        status_code=409,
        content=sc.ErrorResponse(error=type(exc).__name__, message=str(exc)).model_dump(),
    )


@app.post("/info", response_model=sc.MeshInfoResponse)
def info(request: sc.MeshRequest):
    return handlers.mesh_info(request)


@app.post("/gauss-bonnet", response_model=sc.GaussBonnetResponse)
def gauss_bonnet(request: sc.MeshRequest):
    return handlers.gauss_bonnet(request)


@app.post("/cap", response_model=sc.CapResponse)
def cap(request: sc.MeshRequest):
    return handlers.cap(request)


@app.post("/extend/form", response_model=sc.ExtendFormResponse)
def extend_form(request: sc.ExtendFormRequest):
    return handlers.extend_form(request)


@app.post("/extend/field", response_model=sc.ExtendFieldResponse)
def extend_field(request: sc.ExtendFieldRequest):
    return handlers.extend_field(request)


@app.post("/solve", response_model=sc.SolveResponse)
def solve(request: sc.SolveRequest):
    return handlers.solve(request)


@app.post("/prescribe/function", response_model=sc.PrescribeResponse)
def prescribe_function(request: sc.PrescribeFunctionRequest):
    return handlers.prescribe_function(request)


@app.post("/prescribe/form", response_model=sc.PrescribeResponse)
def prescribe_form(request: sc.PrescribeFormRequest):
    return handlers.prescribe_form(request)
