"""The grading pipeline: pre-process, generate, execute, feedback.

One submission flows through four phases.  The learner's fragment is
substituted into the task template and run over a freshly generated test
suite in a student sandbox; the instructor's solution runs over the same
suite in a teacher sandbox; the two result files are compared and a
feedback document (score, stats, one failing example, optional hint) is
synthesized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .codegen import MissingField, fill_template
from .config import TestPlan, WILDCARD_KEY
from .sandbox import (
    HARNESS_FILENAME,
    Limits,
    SPEC_FILENAME,
    STUDENT_PHASE,
    TEACHER_PHASE,
    cleanup_scratch,
    execute,
    make_scratch,
    runner_python,
    SetupError,
)
from .taskstore import TaskPackage
from .testgen import TestSuite, derive_seed, generate_suite, write_suite_csv
from .values import SemType, Value, ValueFormatError, parse_value, values_equal

VERDICT_CHECKED = "checked"
VERDICT_EXCEPTION = "exception"
VERDICT_TIMEOUT = "timeout"
VERDICT_ERROR = "error"
_VERDICTS = {VERDICT_CHECKED, VERDICT_EXCEPTION, VERDICT_TIMEOUT, VERDICT_ERROR}

STATUS_SUCCESS = "success"
STATUS_FAILED = "failed"
STATUS_ERROR = "error"

_LOAD_ERROR_PREFIX = "load-error:"

RESULTS_FILENAME = "data.res"
SOLUTION_RESULTS_FILENAME = "solution.res"
SUITE_FILENAME = "data.csv"
STUDENT_SOURCE_FILENAME = "student.py"
SUBMISSION_ID_FILENAME = "tid"


class TaskError(RuntimeError):
    """The task itself is broken (teacher code fails); not the learner's fault."""


class ResultFormatError(TaskError):
    """A solution.res line does not parse as the declared return type."""


class SubmissionError(ValueError):
    """The inner submission document is malformed."""


@dataclass(frozen=True)
class Submission:
    submission_id: str
    fields: dict[str, str]


def parse_submission(raw: str) -> Submission:
    """Decode the inner input document: {"tid": ..., "fields": {...}}."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SubmissionError(f"submission is not well-formed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SubmissionError("submission must be a JSON object")
    tid = doc.get("tid")
    if not isinstance(tid, str) or not tid:
        raise SubmissionError("submission needs a non-empty text 'tid'")
    fields = doc.get("fields")
    if not isinstance(fields, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in fields.items()
    ):
        raise SubmissionError("submission needs a 'fields' object of text fragments")
    return Submission(tid, dict(fields))


@dataclass(frozen=True)
class TestOutcome:
    index: int
    verdict: str
    value: str


@dataclass(frozen=True)
class FailureExample:
    input: str
    expected: str
    actual: str

    def to_document(self) -> dict:
        return {"input": self.input, "expected": self.expected, "actual": self.actual}


@dataclass(frozen=True)
class Feedback:
    score: float
    succeeded: int
    total: int
    example: FailureExample | None = None
    message: str | None = None

    def to_document(self) -> dict:
        doc: dict = {}
        if self.example is not None:
            doc["example"] = self.example.to_document()
        if self.message is not None:
            doc["message"] = self.message
        doc["stats"] = {"succeeded": self.succeeded, "total": self.total}
        doc["score"] = self.score
        return doc


@dataclass(frozen=True)
class GradeOutput:
    submission_id: str
    status: str
    feedback: Feedback | None = None
    error_detail: str | None = None

    def to_document(self) -> dict:
        doc: dict = {"tid": self.submission_id, "status": self.status}
        if self.feedback is not None:
            doc["feedback"] = self.feedback.to_document()
        if self.error_detail is not None:
            doc["error_detail"] = self.error_detail
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False)


@dataclass(frozen=True)
class GradeOptions:
    limits: Limits = field(default_factory=Limits)
    per_test_time: float = 1.0
    strict_float: bool = False


@dataclass(frozen=True)
class PipelineDetails:
    """run_pipeline's result plus the intermediates tests and tools need."""

    output: GradeOutput
    seed: int
    suite: TestSuite | None = None
    outcomes: tuple[TestOutcome, ...] | None = None
    solution_answers: tuple[str, ...] | None = None
    passes: tuple[bool, ...] | None = None


def compare_results(
    student: list[TestOutcome],
    solution: list[str],
    return_type: SemType,
    *,
    strict_float: bool = False,
) -> list[bool]:
    """Per-test pass flags: checked verdict and typed-equal answers."""
    if len(student) != len(solution):
        raise ValueError(
            f"{len(student)} student outcomes vs {len(solution)} solution answers"
        )
    tolerance = None if strict_float else 1e-6
    passes = []
    for outcome, answer_text in zip(student, solution):
        try:
            expected = parse_value(answer_text, return_type)
        except ValueFormatError as exc:
            raise ResultFormatError(
                f"solution answer {answer_text!r} is not a {return_type.value}: {exc}"
            ) from None
        if outcome.verdict != VERDICT_CHECKED:
            passes.append(False)
            continue
        try:
            actual = parse_value(outcome.value, return_type)
        except ValueFormatError:
            passes.append(False)
            continue
        passes.append(values_equal(actual, expected, float_tolerance=tolerance))
    return passes


def compute_score(passes: list[bool]) -> float:
    return sum(passes) / len(passes)


def _canonical_actual(outcome: TestOutcome, return_type: SemType) -> str | None:
    if outcome.verdict != VERDICT_CHECKED:
        return None
    try:
        return parse_value(outcome.value, return_type).render()
    except ValueFormatError:
        return None


def _example_actual(outcome: TestOutcome) -> str:
    if outcome.verdict == VERDICT_CHECKED:
        return outcome.value
    if outcome.verdict == VERDICT_EXCEPTION:
        return f"exception: {outcome.value}"
    if outcome.verdict == VERDICT_TIMEOUT:
        return "timeout"
    return outcome.value


def _render_input(args: tuple[Value, ...]) -> str:
    return "(" + ",".join(v.render() for v in args) + ")"


def select_feedback(
    suite: TestSuite,
    passes: list[bool],
    outcomes: list[TestOutcome],
    solution: list[str],
    plan: TestPlan,
    return_type: SemType,
) -> tuple[FailureExample | None, str | None]:
    """First failing case (predefined-first order) as the example, plus
    the instructor's hint keyed on the canonical actual answer."""
    if all(passes):
        return None, None
    index = passes.index(False)
    case = suite.cases[index]
    example = FailureExample(
        input=_render_input(case.args),
        expected=solution[index],
        actual=_example_actual(outcomes[index]),
    )
    message = None
    if case.is_predefined:
        feedback_map = plan.predefined[case.predefined_index].feedback_map()
        if feedback_map:
            canonical = _canonical_actual(outcomes[index], return_type)
            if canonical is not None:
                for key, text in feedback_map.items():
                    if key == WILDCARD_KEY:
                        continue
                    if parse_value(key, return_type).render() == canonical:
                        message = text
                        break
            if message is None and WILDCARD_KEY in feedback_map:
                message = feedback_map[WILDCARD_KEY]
    return example, message


def _parse_result_lines(text: str, expected_count: int) -> list[TestOutcome] | str:
    """data.res -> outcomes; returns an error description on malformed files."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) == 1 and lines[0].startswith(_LOAD_ERROR_PREFIX):
        diagnostic = lines[0][len(_LOAD_ERROR_PREFIX):]
        return [
            TestOutcome(i, VERDICT_ERROR, f"load-error: {diagnostic}")
            for i in range(expected_count)
        ]
    if len(lines) != expected_count:
        return f"result file has {len(lines)} lines for {expected_count} tests"
    outcomes = []
    for i, line in enumerate(lines):
        verdict, _, value = line.partition(":")
        if verdict not in _VERDICTS:
            return f"line {i} has unknown verdict {verdict!r}"
        outcomes.append(TestOutcome(i, verdict, value))
    return outcomes


def _runner_command(source_name: str, out_name: str, mode: str, per_test_time: float) -> list[str]:
    # -B: no bytecode cache in the scratch; -S: no site-packages for graded code
    return [
        runner_python(), "-B", "-S", HARNESS_FILENAME,
        "--source", source_name,
        "--spec", SPEC_FILENAME,
        "--csv", SUITE_FILENAME,
        "--out", out_name,
        "--mode", mode,
        "--per-test-time", repr(per_test_time),
    ]


def _error(submission_id: str, seed: int, detail: str, **extras) -> PipelineDetails:
    return PipelineDetails(
        output=GradeOutput(submission_id, STATUS_ERROR, error_detail=detail),
        seed=seed,
        **extras,
    )


def run_pipeline_details(
    task: TaskPackage,
    submission: Submission,
    *,
    seed: int | None = None,
    options: GradeOptions | None = None,
) -> PipelineDetails:
    """Grade one submission, returning the feedback document plus the
    intermediate artifacts (suite, verdicts, pass vector)."""
    options = options or GradeOptions()

    # Phase 1: pre-process. The submission id is recorded as a scratch
    # file and read back by the feedback phase.
    try:
        student_source = fill_template(task.template, submission.fields)
    except MissingField as exc:
        return _error(submission.submission_id, 0, f"submission incomplete: {exc.name!r} missing")

    # Phase 2: generate the test suite.
    override = seed
    if override is None and task.plan.random is not None:
        override = task.plan.random.seed
    actual_seed = derive_seed(task.task_id, submission.submission_id, override)
    suite = generate_suite(task.plan, task.spec, actual_seed)
    csv_text = write_suite_csv(suite)

    # Phase 3: execute the student code.
    student_scratch = None
    teacher_scratch = None
    try:
        try:
            student_scratch = make_scratch(
                task,
                STUDENT_PHASE,
                {
                    STUDENT_SOURCE_FILENAME: student_source,
                    SUITE_FILENAME: csv_text,
                    SUBMISSION_ID_FILENAME: submission.submission_id + "\n",
                },
            )
            student_run = execute(
                _runner_command(
                    STUDENT_SOURCE_FILENAME, RESULTS_FILENAME,
                    "student", options.per_test_time,
                ),
                student_scratch,
                options.limits,
            )
        except SetupError as exc:
            return _error(submission.submission_id, actual_seed, f"sandbox failure: {exc}", suite=suite)

        if student_run.status == "timeout":
            return _error(
                submission.submission_id, actual_seed,
                f"student execution timed out after {options.limits.wall_time}s",
                suite=suite,
            )
        if student_run.exit_code != 0:
            first = student_run.stderr_text.splitlines()
            detail = first[0] if first else ""
            return _error(
                submission.submission_id, actual_seed,
                f"student runner exited with code {student_run.exit_code}: {detail}",
                suite=suite,
            )
        try:
            results_text = (student_scratch / RESULTS_FILENAME).read_text(encoding="utf-8")
        except OSError:
            return _error(
                submission.submission_id, actual_seed,
                "student runner produced no result file", suite=suite,
            )
        parsed = _parse_result_lines(results_text, len(suite))
        if isinstance(parsed, str):
            return _error(submission.submission_id, actual_seed, parsed, suite=suite)
        outcomes = parsed

        # Recover the recorded submission id (pre-process phase artifact).
        reported_id = submission.submission_id
        try:
            recorded = (student_scratch / SUBMISSION_ID_FILENAME).read_text(
                encoding="utf-8"
            ).strip()
            if recorded:
                reported_id = recorded
        except OSError:
            pass

        # Phase 4: run the solution and synthesize feedback.
        try:
            teacher_scratch = make_scratch(task, TEACHER_PHASE, {SUITE_FILENAME: csv_text})
            teacher_run = execute(
                _runner_command(
                    "teacher.py", SOLUTION_RESULTS_FILENAME,
                    "teacher", options.per_test_time,
                ),
                teacher_scratch,
                options.limits,
            )
        except SetupError as exc:
            return _error(reported_id, actual_seed, f"sandbox failure: {exc}", suite=suite)
        if teacher_run.status == "timeout" or teacher_run.exit_code != 0:
            return _error(
                reported_id, actual_seed,
                f"task misconfigured: teacher run ended with status "
                f"{teacher_run.status}, exit {teacher_run.exit_code}",
                suite=suite,
            )
        try:
            solution_text = (teacher_scratch / SOLUTION_RESULTS_FILENAME).read_text(
                encoding="utf-8"
            )
        except OSError:
            return _error(reported_id, actual_seed,
                          "task misconfigured: no solution results", suite=suite)
    finally:
        if student_scratch is not None:
            cleanup_scratch(student_scratch)
        if teacher_scratch is not None:
            cleanup_scratch(teacher_scratch)

    solution_lines = solution_text.split("\n")
    if solution_lines and solution_lines[-1] == "":
        solution_lines.pop()
    if len(solution_lines) == 1 and solution_lines[0].startswith(_LOAD_ERROR_PREFIX):
        return _error(
            reported_id, actual_seed,
            f"task misconfigured: teacher source failed to load "
            f"({solution_lines[0][len(_LOAD_ERROR_PREFIX):]})",
            suite=suite,
        )
    if len(solution_lines) != len(suite):
        return _error(
            reported_id, actual_seed,
            f"task misconfigured: {len(solution_lines)} solution answers "
            f"for {len(suite)} tests",
            suite=suite,
        )
    bad = next((line for line in solution_lines if line.startswith("#")), None)
    if bad is not None:
        return _error(
            reported_id, actual_seed,
            f"task misconfigured: teacher test not checked ({bad.lstrip('#').strip()})",
            suite=suite,
        )

    try:
        passes = compare_results(
            outcomes, solution_lines, task.spec.return_type,
            strict_float=options.strict_float,
        )
    except TaskError as exc:
        return _error(reported_id, actual_seed, f"task misconfigured: {exc}", suite=suite)

    example, message = select_feedback(
        suite, passes, outcomes, solution_lines, task.plan, task.spec.return_type
    )
    succeeded = sum(passes)
    feedback = Feedback(
        score=compute_score(passes),
        succeeded=succeeded,
        total=len(passes),
        example=example,
        message=message,
    )
    status = STATUS_SUCCESS if succeeded == len(passes) else STATUS_FAILED
    return PipelineDetails(
        output=GradeOutput(reported_id, status, feedback=feedback),
        seed=actual_seed,
        suite=suite,
        outcomes=tuple(outcomes),
        solution_answers=tuple(solution_lines),
        passes=tuple(passes),
    )


def run_pipeline(
    task: TaskPackage,
    submission: Submission,
    *,
    seed: int | None = None,
    options: GradeOptions | None = None,
) -> GradeOutput:
    return run_pipeline_details(task, submission, seed=seed, options=options).output
