"""Command-line client for the curvature toolkit.

The CLI is a thin client of the service layer: every command parses its
files into the same request models the HTTP API accepts, runs the matching
handler (in-process by default, or against a running server via --server),
and writes the response as canonical JSON. Identical invocations produce
byte-identical output files.

Exit codes: 0 success, 1 validation error (bad files, bad mesh, bad
targets), 2 solver failure (line-search stall or iteration limit).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pydantic import ValidationError as PydanticValidationError

from .errors import SolverFailure, ValidationError
from .jsonutil import canonical_dumps
from .offio import read_lengths_sidecar, read_off, write_off
from .service import handlers
from .service import schemas as sc

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; that code is reserved for
    solver failures here, so remap to the validation exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="curvcap",
        description="Prescribe discrete curvature on triangulated surfaces with boundary.",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        help="POST requests to a running curvcap service instead of computing in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, target=None, solver=False, extra=None):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--mesh", required=True, help="input OFF file")
        p.add_argument("--lengths", help="JSON edge-length sidecar (authoritative metric)")
        p.add_argument("--out", help="output path (default: JSON to stdout)")
        if target:
            grp = p.add_mutually_exclusive_group(required=(target == "required"))
            grp.add_argument("--target", help="JSON file with the target values")
            grp.add_argument("--const", type=float, help="constant target value")
        if solver:
            p.add_argument("--tol", type=float, default=1e-10, help="residual tolerance")
            p.add_argument("--max-iter", type=int, default=50, help="iteration limit")
            p.add_argument("--trace", action="store_true", help="record per-iteration progress")
        if extra:
            extra(p)
        return p

    add("info", "print V/E/F, Euler characteristic and boundary loop count")
    add("check-gb", "compute curvatures and the Gauss-Bonnet residual")
    add("cap", "glue disk caps onto every boundary loop")

    def form_flags(p):
        p.add_argument("--total", type=float, help="prescribed capped integral (default: 2*pi*chi)")
        p.add_argument("--seed", type=float, help="cap seed value (default: boundary-face mean)")

    add("extend-form", "extend a face form across the caps", target="required", extra=form_flags)
    add("extend-fn", "extend a vertex function to satisfy the sign condition", target="required")
    add("solve", "solve prescribed curvature on a closed mesh", target="required", solver=True)
    add(
        "prescribe-fn",
        "prescribe interior angle defects on a bounded mesh",
        target="required",
        solver=True,
    )

    def seed_flag(p):
        p.add_argument("--seed", type=float, help="cap seed value (default: boundary-face mean)")

    add(
        "prescribe-form",
        "prescribe a curvature form on a bounded mesh",
        target="required",
        solver=True,
        extra=seed_flag,
    )
    return parser


# -- request assembly ---------------------------------------------------------


def _mesh_payload(args) -> sc.MeshPayload:
    coords, faces = read_off(args.mesh)
    lengths = None
    if args.lengths:
        lengths = [
            (i, j, L) for (i, j), L in sorted(read_lengths_sidecar(args.lengths).items())
        ]
    return sc.MeshPayload(
        faces=faces,
        coordinates=[tuple(c) for c in coords],
        lengths=lengths,
    )


def _load_json(path, key: str) -> list[float]:
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict) or key not in payload:
        raise ValidationError(f"{path}: expected an object with a {key!r} key")
    values = payload[key]
    if not isinstance(values, list) or not all(isinstance(x, (int, float)) for x in values):
        raise ValidationError(f"{path}: {key!r} must be a list of numbers")
    return [float(x) for x in values]


def _form_spec(args) -> sc.FormSpec:
    if args.const is not None:
        return sc.FormSpec(constant=args.const)
    return sc.FormSpec(face_values=_load_json(args.target, "face_values"))


def _field_spec(args) -> sc.FieldSpec:
    if args.const is not None:
        return sc.FieldSpec(constant=args.const)
    return sc.FieldSpec(vertex_values=_load_json(args.target, "vertex_values"))


def _settings(args) -> sc.SolveSettings:
    return sc.SolveSettings(tol=args.tol, max_iter=args.max_iter, trace=args.trace)


# -- transport ----------------------------------------------------------------

_ENDPOINTS = {
    "info": ("/info", handlers.mesh_info, sc.MeshInfoResponse),
    "check-gb": ("/gauss-bonnet", handlers.gauss_bonnet, sc.GaussBonnetResponse),
    "cap": ("/cap", handlers.cap, sc.CapResponse),
    "extend-form": ("/extend/form", handlers.extend_form, sc.ExtendFormResponse),
    "extend-fn": ("/extend/field", handlers.extend_field, sc.ExtendFieldResponse),
    "solve": ("/solve", handlers.solve, sc.SolveResponse),
    "prescribe-fn": ("/prescribe/function", handlers.prescribe_function, sc.PrescribeResponse),
    "prescribe-form": ("/prescribe/form", handlers.prescribe_form, sc.PrescribeResponse),
}


def _call(args, request):
    path, handler, response_model = _ENDPOINTS[args.command]
    if not args.server:
        return handler(request)

    import httpx

    resp = httpx.post(
        args.server.rstrip("/") + path,
        json=request.model_dump(mode="json"),
        timeout=300.0,
    )
    if resp.status_code == 400:
        detail = resp.json()
        raise ValidationError(f"{detail.get('error')}: {detail.get('message')}")
    if resp.status_code == 409:
        detail = resp.json()
        raise SolverFailure(f"{detail.get('error')}: {detail.get('message')}")
    if resp.status_code == 422:
        raise ValidationError(f"server rejected the request: {resp.text}")
    resp.raise_for_status()
    return response_model.model_validate(resp.json())


# -- output -------------------------------------------------------------------


def _emit_json(args, payload: dict) -> None:
    text = canonical_dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_trace(args, response) -> None:
    """With --out, put the JSONL trace next to it; otherwise it is already
    embedded in the response JSON."""
    if not getattr(args, "trace", False) or not args.out or response.trace is None:
        return
    lines = [canonical_dumps(r.model_dump(), indent=0).replace("\n", "") for r in response.trace]
    lines.append(f'{{"termination": "{response.termination}"}}')
    Path(args.out).with_suffix(".trace.jsonl").write_text("\n".join(lines) + "\n")


# -- commands -----------------------------------------------------------------


def _run_info(args) -> int:
    response = _call(args, sc.MeshRequest(mesh=_mesh_payload(args)))
    print(
        f"V={response.num_vertices} E={response.num_edges} F={response.num_faces} "
        f"chi={response.euler_characteristic} boundary_loops={response.boundary_loop_count}"
    )
    if args.out:
        _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_check_gb(args) -> int:
    response = _call(args, sc.MeshRequest(mesh=_mesh_payload(args)))
    print(f"gauss-bonnet residual: {response.gb_residual:.17g}", file=sys.stderr)
    for k, total in enumerate(response.loop_turning_totals):
        print(f"boundary loop {k}: turning total {total:.17g}", file=sys.stderr)
    _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_cap(args) -> int:
    response = _call(args, sc.MeshRequest(mesh=_mesh_payload(args)))
    if args.out:
        out = Path(args.out)
        if response.capped.coordinates is None:
            raise ValidationError("cap --out needs coordinates in the input OFF")
        write_off(out, response.capped.coordinates, response.capped.faces)
        base = out.with_suffix("")
        Path(f"{base}.lengths.json").write_text(
            canonical_dumps({"lengths": [list(row) for row in response.capped.lengths]})
        )
        Path(f"{base}.atlas.json").write_text(
            canonical_dumps(response.atlas.model_dump())
        )
        print(
            f"wrote {out}, {base}.lengths.json, {base}.atlas.json", file=sys.stderr
        )
    else:
        _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_extend_form(args) -> int:
    request = sc.ExtendFormRequest(
        mesh=_mesh_payload(args),
        form=_form_spec(args),
        total=args.total,
        seed=args.seed,
    )
    response = _call(args, request)
    report = response.report
    print(
        f"extension: cap target {report.target_total:.17g}, scale {report.scale:.17g}",
        file=sys.stderr,
    )
    _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_extend_fn(args) -> int:
    request = sc.ExtendFieldRequest(mesh=_mesh_payload(args), field=_field_spec(args))
    response = _call(args, request)
    s = response.summary
    print(
        f"sign condition for chi={s.chi_capped}: holds={s.holds} "
        f"(apex_overridden={s.apex_overridden})",
        file=sys.stderr,
    )
    _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_solve(args) -> int:
    request = sc.SolveRequest(
        mesh=_mesh_payload(args), target=_field_spec(args), settings=_settings(args)
    )
    response = _call(args, request)
    print(
        f"converged in {response.iterations} iterations, residual {response.residual:.3e}",
        file=sys.stderr,
    )
    _write_trace(args, response)
    _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_prescribe_fn(args) -> int:
    request = sc.PrescribeFunctionRequest(
        mesh=_mesh_payload(args), target=_field_spec(args), settings=_settings(args)
    )
    response = _call(args, request)
    print(
        f"prescribed in {response.iterations} iterations, max_error {response.max_error:.3e}",
        file=sys.stderr,
    )
    _write_trace(args, response)
    _emit_json(args, response.model_dump())
    return EXIT_OK


def _run_prescribe_form(args) -> int:
    request = sc.PrescribeFormRequest(
        mesh=_mesh_payload(args),
        form=_form_spec(args),
        seed=args.seed,
        settings=_settings(args),
    )
    response = _call(args, request)
    print(
        f"prescribed in {response.iterations} iterations, max_error {response.max_error:.3e}",
        file=sys.stderr,
    )
    _write_trace(args, response)
    _emit_json(args, response.model_dump())
    return EXIT_OK


_RUNNERS = {
    "info": _run_info,
    "check-gb": _run_check_gb,
    "cap": _run_cap,
    "extend-form": _run_extend_form,
    "extend-fn": _run_extend_fn,
    "solve": _run_solve,
    "prescribe-fn": _run_prescribe_fn,
    "prescribe-form": _run_prescribe_form,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except ValidationError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PydanticValidationError as exc:
        print(f"error [request validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverFailure as exc:
        print(f"solver failure [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
