"""gradeforge: declarative unit-testing exercises, sandboxed autograding,
pedagogical feedback."""

from .config import (
    DslError,
    SchemaError,
    TaskConfig,
    TupleError,
    parse_args_tuple,
    parse_generator_expr,
    parse_task_config,
)
from .grading import (
    Feedback,
    GradeOptions,
    GradeOutput,
    Submission,
    parse_submission,
    run_pipeline,
    run_pipeline_details,
)
from .sandbox import Limits, SandboxOutcome, execute, make_scratch
from .taskstore import Manifest, TaskPackage, TaskStore
from .testgen import TestCase, TestSuite, derive_seed, generate_suite, write_suite_csv
from .values import SemType, Value, parse_value, render_value

__version__ = "0.1.0"

__all__ = [
    "DslError",
    "Feedback",
    "GradeOptions",
    "GradeOutput",
    "Limits",
    "Manifest",
    "SandboxOutcome",
    "SchemaError",
    "SemType",
    "Submission",
    "TaskConfig",
    "TaskPackage",
    "TaskStore",
    "TestCase",
    "TestSuite",
    "TupleError",
    "Value",
    "derive_seed",
    "execute",
    "generate_suite",
    "make_scratch",
    "parse_args_tuple",
    "parse_generator_expr",
    "parse_submission",
    "parse_task_config",
    "parse_value",
    "render_value",
    "run_pipeline",
    "run_pipeline_details",
    "write_suite_csv",
]
