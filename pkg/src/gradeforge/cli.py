"""Command line driver: create task packages, grade submission files,
run the HTTP server.  `grade` prints the inner feedback document only,
which keeps golden fixtures independent of the HTTP envelope."""

from __future__ import annotations

import argparse
import json
import sys

from .config import SchemaError, parse_task_config
from .grading import (
    GradeOptions,
    STATUS_ERROR,
    SubmissionError,
    parse_submission,
    run_pipeline,
)
from .taskstore import TaskStore, TaskStoreError
from .codegen import UnsupportedLanguage


def _cmd_create(args: argparse.Namespace) -> int:
    try:
        raw = open(args.config, encoding="utf-8").read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        config = parse_task_config(raw)
        manifest = TaskStore(args.task_dir).create_task(
            "unit-testing", args.language, config, args.id
        )
    except (SchemaError, TaskStoreError, UnsupportedLanguage) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(manifest.to_document(), indent=2))
    return 0


def _cmd_grade(args: argparse.Namespace) -> int:
    store = TaskStore(args.task_dir)
    try:
        task = store.load_task(args.task)
    except TaskStoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        raw = open(args.submission, encoding="utf-8").read()
        submission = parse_submission(raw)
    except (OSError, SubmissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    output = run_pipeline(task, submission, seed=args.seed, options=GradeOptions())
    print(output.to_json())
    return 1 if output.status == STATUS_ERROR else 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        print(f"error: --addr must look like host:port, got {args.addr!r}",
              file=sys.stderr)
        return 1
    uvicorn.run(create_app(TaskStore(args.task_dir)), host=host, port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradeforge",
        description="generate and grade unit-testing-based programming exercises",
    )
    parser.add_argument(
        "--task-dir", default=None,
        help="task package root (default: $GRADER_TASK_DIR)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_create = sub.add_parser("create", help="compile a task configuration")
    p_create.add_argument("--config", required=True, help="configuration JSON file")
    p_create.add_argument("--language", default="python")
    p_create.add_argument("--id", default=None, help="requested task id")
    p_create.set_defaults(func=_cmd_create)

    p_grade = sub.add_parser("grade", help="grade one submission file")
    p_grade.add_argument("--task", required=True, help="task id")
    p_grade.add_argument("--submission", required=True,
                         help="submission document JSON file")
    p_grade.add_argument("--seed", type=int, default=None,
                         help="pin the random-test seed")
    p_grade.set_defaults(func=_cmd_grade)

    p_serve = sub.add_parser("serve", help="run the HTTP API server")
    p_serve.add_argument("--addr", default="127.0.0.1:8000")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
