import json

import pytest

from gradeforge.config import parse_args_tuple, validate_config
from gradeforge.grading import (
    Feedback,
    GradeOptions,
    GradeOutput,
    ResultFormatError,
    Submission,
    SubmissionError,
    TestOutcome,
    _parse_result_lines,
    compare_results,
    compute_score,
    parse_submission,
    run_pipeline,
    run_pipeline_details,
    select_feedback,
)
from gradeforge.sandbox import Limits
from gradeforge.taskstore import TaskStore
from gradeforge.testgen import generate_suite
from gradeforge.values import SemType, Value, parse_value, render_value


def direct_eval(body, arg_names, args):
    """Independent oracle: run a fragment outside the whole pipeline."""
    indented = "\n".join("    " + line for line in body.split("\n"))
    namespace = {}
    exec(f"def _fn({', '.join(arg_names)}):\n{indented}\n", namespace)
    return namespace["_fn"](*args)


def checked(value_text):
    return TestOutcome(0, "checked", value_text)


class TestParseSubmission:
    def test_fig2_input_document(self):
        submission = parse_submission('{"tid": "s001", "fields": {"f1": "return a"}}')
        assert submission == Submission("s001", {"f1": "return a"})

    def test_malformed(self):
        for bad in ("not-json", "[]", '{"tid": "", "fields": {}}',
                    '{"tid": "x"}', '{"tid": "x", "fields": {"f1": 3}}'):
            with pytest.raises(SubmissionError):
                parse_submission(bad)


class TestCompareResults:
    def test_identity_pass(self):
        assert compare_results([checked("5")], ["5"], SemType.INT) == [True]

    def test_fig2_mismatch(self):
        assert compare_results([checked("10")], ["5"], SemType.INT) == [False]

    def test_non_checked_fails(self):
        outcome = TestOutcome(0, "exception", "ZeroDivisionError: division by zero")
        assert compare_results([outcome], ["5"], SemType.INT) == [False]

    def test_float_tolerance(self):
        assert compare_results([checked("1.0000005")], ["1.0"], SemType.FLOAT) == [True]
        assert compare_results([checked("1.01")], ["1.0"], SemType.FLOAT) == [False]
        strict = compare_results([checked("1.0000005")], ["1.0"], SemType.FLOAT,
                                 strict_float=True)
        assert strict == [False]

    def test_unparsable_solution_is_task_fault(self):
        with pytest.raises(ResultFormatError):
            compare_results([checked("5")], ["banana"], SemType.INT)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            compare_results([checked("5")], [], SemType.INT)


class TestComputeScore:
    def test_fig2_pair(self):
        score = compute_score([True] * 2 + [False] * 12)
        assert abs(score - 0.14285715) < 1e-6

    def test_full_and_zero(self):
        assert compute_score([True] * 14) == 1.0
        assert compute_score([False] * 10) == 0.0


class TestResultLines:
    def test_normal_lines(self):
        parsed = _parse_result_lines("checked:5\ntimeout\nexception:E: boom\n", 3)
        assert [o.verdict for o in parsed] == ["checked", "timeout", "exception"]
        assert parsed[2].value == "E: boom"

    def test_load_error_expansion(self):
        parsed = _parse_result_lines("load-error:SyntaxError: bad\n", 3)
        assert len(parsed) == 3
        assert all(o.verdict == "error" for o in parsed)
        assert all(o.value == "load-error: SyntaxError: bad" for o in parsed)

    def test_truncated_file(self):
        assert isinstance(_parse_result_lines("checked:5\n", 3), str)

    def test_unknown_verdict(self):
        assert isinstance(_parse_result_lines("weird:5\n", 1), str)


class TestSelectFeedback:
    def _fig4_parts(self, fig4_config, answers_by_case):
        suite = generate_suite(fig4_config.test, fig4_config.spec, seed=7)
        outcomes = []
        solution = []
        for case in suite.cases:
            a, b = (v.data for v in case.args)
            solution.append(str(a - b))
            outcomes.append(TestOutcome(case.index, "checked",
                                        str(answers_by_case(a, b))))
        passes = [o.value == s for o, s in zip(outcomes, solution)]
        return suite, passes, outcomes, solution

    def test_exact_key_message(self, fig4_config):
        suite, passes, outcomes, solution = self._fig4_parts(
            fig4_config, lambda a, b: a
        )
        example, message = select_feedback(
            suite, passes, outcomes, solution, fig4_config.test, SemType.INT
        )
        assert example.input == "(10,5)"
        assert example.expected == "5"
        assert example.actual == "10"
        assert message == "Have you subtracted the 2nd parameter?"

    def test_wildcard_message(self, fig4_config):
        # Correct on non-negative inputs, wrong on (-1, 2): first failure
        # carries the wildcard entry.
        suite, passes, outcomes, solution = self._fig4_parts(
            fig4_config, lambda a, b: a - b if a >= 0 else 0
        )
        example, message = select_feedback(
            suite, passes, outcomes, solution, fig4_config.test, SemType.INT
        )
        assert example.input == "(-1,2)"
        assert message == "Have you considered negative parameters?"

    def test_no_exact_key_no_wildcard(self, fig4_config):
        suite, passes, outcomes, solution = self._fig4_parts(
            fig4_config, lambda a, b: a + b
        )
        example, message = select_feedback(
            suite, passes, outcomes, solution, fig4_config.test, SemType.INT
        )
        assert example.input == "(10,5)"
        assert example.actual == "15"
        assert message is None

    def test_random_case_failure_has_no_message(self, fig4_config):
        # Fail only on a case with b != 0 among the random rows by passing
        # all predefined and flipping one random outcome.
        suite = generate_suite(fig4_config.test, fig4_config.spec, seed=7)
        solution = [str(c.args[0].data - c.args[1].data) for c in suite.cases]
        outcomes = [TestOutcome(i, "checked", s) for i, s in enumerate(solution)]
        outcomes[7] = TestOutcome(7, "checked", "9999")
        passes = [o.value == s for o, s in zip(outcomes, solution)]
        example, message = select_feedback(
            suite, passes, outcomes, solution, fig4_config.test, SemType.INT
        )
        assert example is not None
        assert message is None

    def test_all_pass(self, fig4_config):
        suite, passes, outcomes, solution = self._fig4_parts(
            fig4_config, lambda a, b: a - b
        )
        example, message = select_feedback(
            suite, passes, outcomes, solution, fig4_config.test, SemType.INT
        )
        assert example is None and message is None

    def test_canonical_key_matching(self):
        # "10" must match however the answer was printed, e.g. float keys.
        doc = {
            "spec": {"name": "f", "args": [{"name": "x", "type": "float"}],
                     "return": "float"},
            "test": {"predefined": [
                {"data": "(1.0)", "feedback": {"0.50": "half?"}}
            ]},
            "solution": {"f1": "return x"},
        }
        config = validate_config(doc)
        suite = generate_suite(config.test, config.spec, seed=0)
        outcomes = [TestOutcome(0, "checked", "0.5")]
        example, message = select_feedback(
            suite, [False], outcomes, ["1.0"], config.test, SemType.FLOAT
        )
        assert message == "half?"


class TestPipeline:
    def test_wrong_fragment_fig2_shape(self, sub_task):
        details = run_pipeline_details(
            sub_task, Submission("s001", {"f1": "return a"}), seed=42
        )
        output = details.output
        assert output.status == "failed"
        assert output.submission_id == "s001"
        fb = output.feedback
        assert fb.total == 14
        assert fb.example.input == "(10,5)"
        assert fb.example.expected == "5"
        assert fb.example.actual == "10"
        assert fb.message == "Have you subtracted the 2nd parameter?"
        assert abs(fb.score - fb.succeeded / fb.total) < 1e-12

    def test_correct_fragment_full_score(self, sub_task):
        output = run_pipeline(sub_task, Submission("s002", {"f1": "return a - b"}))
        assert output.status == "success"
        assert output.feedback.score == 1.0
        assert output.feedback.example is None
        assert output.feedback.message is None

    def test_pass_vector_matches_direct_oracle(self, sub_task):
        details = run_pipeline_details(
            sub_task, Submission("s001", {"f1": "return a"}), seed=42
        )
        expected = []
        for case in details.suite.cases:
            a, b = (v.data for v in case.args)
            expected.append(direct_eval("return a", ["a", "b"], [a, b]) == a - b)
        assert list(details.passes) == expected

    def test_example_honesty(self, sub_task):
        for body in ("return a", "return a + b", "return b - a"):
            details = run_pipeline_details(
                sub_task, Submission("s00x", {"f1": body}), seed=7
            )
            example = details.output.feedback.example
            args = [
                v.data
                for v in parse_args_tuple(example.input, [SemType.INT, SemType.INT])
            ]
            actual = direct_eval(body, ["a", "b"], args)
            expected = direct_eval("return a - b", ["a", "b"], args)
            assert example.actual == str(actual)
            assert example.expected == str(expected)

    def test_solution_self_consistency_corpus(self, store, corpus):
        for tid, doc in corpus:
            config = validate_config(doc)
            store.create_task("unit-testing", "python", config, tid)
            task = store.load_task(tid)
            output = run_pipeline(
                task, Submission("self", dict(config.solution.fields))
            )
            assert output.status == "success", (tid, output.to_document())
            assert output.feedback.score == 1.0

    def test_syntax_error_fragment_scores_zero(self, sub_task):
        details = run_pipeline_details(
            sub_task, Submission("s003", {"f1": "return (("}), seed=1
        )
        output = details.output
        assert output.status == "failed"
        assert output.feedback.score == 0.0
        assert output.feedback.succeeded == 0
        assert output.feedback.example.actual.startswith("load-error:")
        assert all(o.verdict == "error" for o in details.outcomes)

    def test_infinite_loop_times_out_per_test(self, sub_task):
        options = GradeOptions(
            limits=Limits(wall_time=20.0, memory=512 * 1024 * 1024,
                          output_bytes=16384, max_processes=16),
            per_test_time=0.2,
        )
        output = run_pipeline(
            sub_task, Submission("s004", {"f1": "while True: pass"}),
            seed=1, options=options,
        )
        assert output.status == "failed"
        assert output.feedback.succeeded == 0
        assert output.feedback.example.actual == "timeout"

    def test_whole_phase_timeout_is_error(self, sub_task):
        options = GradeOptions(
            limits=Limits(wall_time=2.0, memory=512 * 1024 * 1024,
                          output_bytes=16384, max_processes=16),
            per_test_time=30.0,
        )
        output = run_pipeline(
            sub_task, Submission("s005", {"f1": "while True: pass"}),
            seed=1, options=options,
        )
        assert output.status == "error"
        assert "timed out" in output.error_detail
        assert output.feedback is None

    def test_missing_field_is_error(self, sub_task):
        output = run_pipeline(sub_task, Submission("s006", {}))
        assert output.status == "error"
        assert "f1" in output.error_detail

    def test_determinism(self, sub_task):
        a = run_pipeline(sub_task, Submission("s007", {"f1": "return a"}), seed=5)
        b = run_pipeline(sub_task, Submission("s007", {"f1": "return a"}), seed=5)
        assert a.to_json() == b.to_json()

    def test_config_seed_pins_suite(self, store, fig4_doc):
        fig4_doc["test"]["random"]["seed"] = 77
        config = validate_config(fig4_doc)
        store.create_task("unit-testing", "python", config, "pinned")
        task = store.load_task("pinned")
        d1 = run_pipeline_details(task, Submission("x", {"f1": "return a"}))
        d2 = run_pipeline_details(task, Submission("y", {"f1": "return a"}))
        assert d1.seed == 77
        assert d1.suite == d2.suite

    def test_different_submissions_different_suites(self, sub_task):
        d1 = run_pipeline_details(sub_task, Submission("alice", {"f1": "return a"}))
        d2 = run_pipeline_details(sub_task, Submission("bob", {"f1": "return a"}))
        assert d1.suite != d2.suite
        d1_again = run_pipeline_details(sub_task, Submission("alice", {"f1": "return a"}))
        assert d1.suite == d1_again.suite

    def test_strict_float_option(self, store):
        doc = {
            "spec": {"name": "h", "args": [{"name": "x", "type": "float"}],
                     "return": "float"},
            "test": {"predefined": [{"data": "(3.0)"}]},
            "solution": {"f1": "return x / 2.0"},
        }
        config = validate_config(doc)
        store.create_task("unit-testing", "python", config, "h")
        task = store.load_task("h")
        wobble = {"f1": "return x / 2.0 + 1e-9"}
        relaxed = run_pipeline(task, Submission("s", wobble))
        assert relaxed.status == "success"
        strict = run_pipeline(task, Submission("s", wobble),
                              options=GradeOptions(strict_float=True))
        assert strict.status == "failed"

    def test_output_document_shape(self, sub_task):
        output = run_pipeline(sub_task, Submission("s001", {"f1": "return a"}), seed=42)
        doc = output.to_document()
        assert list(doc) == ["tid", "status", "feedback"]
        assert list(doc["feedback"]) == ["example", "message", "stats", "score"]
        assert list(doc["feedback"]["example"]) == ["input", "expected", "actual"]
        assert list(doc["feedback"]["stats"]) == ["succeeded", "total"]
        success = run_pipeline(sub_task, Submission("s001", {"f1": "return a - b"}))
        doc = success.to_document()
        assert "example" not in doc["feedback"]
        assert "message" not in doc["feedback"]
