"""HTTP front door: task creation, submission execution, task views.

Submissions travel as opaque strings inside a thin envelope: the outer
request names the task and carries the inner submission document; the
outer response echoes the task id, reports the backend status and holds
the serialized grading output.  Inner failures (a bad submission
document) are data, not transport errors, so they come back as HTTP 200
with an inner error document.
"""

from __future__ import annotations

import json
import logging

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .codegen import UnsupportedLanguage
from .config import SchemaError, validate_config
from .grading import (
    GradeOptions,
    GradeOutput,
    STATUS_ERROR,
    SubmissionError,
    parse_submission,
    run_pipeline,
)
from .taskstore import (
    CorruptPackage,
    DuplicateId,
    InvalidTaskId,
    NotFound,
    SolutionLoadError,
    TaskStore,
    UnsupportedType,
)

log = logging.getLogger(__name__)

MAX_INPUT_BYTES = 1024 * 1024
OUTPUT_CAP_BYTES = 16384

BACKEND_SUCCESS = "success"
BACKEND_TIMEOUT = "timeout"
BACKEND_OVERFLOW = "overflow"
BACKEND_ERROR = "error"


class CreateTaskBody(BaseModel):
    type: str
    language: str
    config: dict
    id: str | None = None


class ExecuteBody(BaseModel):
    tid: str
    input: str


def _cap_output(text: str) -> tuple[str, bool]:
    raw = text.encode("utf-8")
    if len(raw) <= OUTPUT_CAP_BYTES:
        return text, False
    # Truncate at a valid UTF-8 boundary.
    return raw[:OUTPUT_CAP_BYTES].decode("utf-8", errors="ignore"), True


def create_app(
    store: TaskStore | None = None,
    options: GradeOptions | None = None,
) -> FastAPI:
    store = store or TaskStore()
    app = FastAPI(title="gradeforge", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request, exc):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/api/tasks", status_code=201)
    def create_task(body: CreateTaskBody):
        try:
            config = validate_config(body.config)
            manifest = store.create_task(body.type, body.language, config, body.id)
        except SchemaError as exc:
            return JSONResponse(
                status_code=400, content={"error": exc.message, "path": exc.path}
            )
        except (UnsupportedType, UnsupportedLanguage, InvalidTaskId) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except DuplicateId as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except SolutionLoadError as exc:
            return JSONResponse(status_code=422, content={"error": str(exc)})
        return manifest.to_document()

    @app.post("/api/execute")
    def execute_task(body: ExecuteBody):
        if not body.tid or not body.input:
            return JSONResponse(
                status_code=400, content={"error": "tid and input must be non-empty"}
            )
        if len(body.input.encode("utf-8")) > MAX_INPUT_BYTES:
            return JSONResponse(
                status_code=400,
                content={"error": f"input exceeds {MAX_INPUT_BYTES} bytes"},
            )
        try:
            task = store.load_task(body.tid)
        except NotFound as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        except CorruptPackage as exc:
            return JSONResponse(status_code=500, content={"error": str(exc)})

        try:
            submission = parse_submission(body.input)
        except SubmissionError as exc:
            inner = GradeOutput("", STATUS_ERROR, error_detail=str(exc))
            return {"tid": body.tid, "status": BACKEND_SUCCESS, "output": inner.to_json()}

        try:
            output = run_pipeline(task, submission, options=options)
        except Exception:
            log.exception("grading pipeline crashed for task %s", body.tid)
            return {
                "tid": body.tid,
                "status": BACKEND_ERROR,
                "output": "internal grading failure",
            }
        text, overflowed = _cap_output(output.to_json())
        status = BACKEND_OVERFLOW if overflowed else BACKEND_SUCCESS
        return {"tid": body.tid, "status": status, "output": text}

    @app.get("/api/tasks")
    def list_tasks():
        return [manifest.to_document() for manifest in store.list_tasks()]

    @app.get("/api/tasks/{tid}")
    def task_view(tid: str):
        try:
            task = store.load_task(tid)
        except NotFound as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        except CorruptPackage as exc:
            return JSONResponse(status_code=500, content={"error": str(exc)})
        # Public view only: signature and predefined inputs, never the
        # solution, generators or feedback messages.
        return {
            "task_id": task.task_id,
            "language": task.language,
            "spec": json.loads(task.spec_json),
            "predefined": [p.data for p in task.plan.predefined],
        }

    return app
