"""Acceptance suite: one test per release criterion, each printing a
PASS line (run with -v or -s for the per-criterion report)."""

import glob
import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from gradeforge.api import create_app
from gradeforge.cli import main
from gradeforge.config import validate_config
from gradeforge.grading import (
    GradeOptions,
    Submission,
    compute_score,
    run_pipeline,
    run_pipeline_details,
)
from gradeforge.sandbox import Limits, sandbox_user
from gradeforge.taskstore import TaskStore

GOLDEN = Path(__file__).parent / "fixtures" / "golden"
FIG2_INPUT = '{"tid": "s001", "fields": {"f1": "return a"}}'
PINNED_SEED = 42


def _report(name):
    print(f"ACCEPTANCE PASS: {name}")


def _direct_eval(body, args):
    namespace = {}
    indented = "\n".join("    " + line for line in body.split("\n"))
    exec(f"def _fn(a, b):\n{indented}\n", namespace)
    return namespace["_fn"](*args)


def test_c1_figure2_reproduction(sub_task):
    """Create the two-argument subtraction task, grade the fragment that
    forgets the second parameter, and check every feedback element."""
    start = time.monotonic()
    details = run_pipeline_details(
        sub_task, Submission("s001", {"f1": "return a"}), seed=PINNED_SEED
    )
    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"grading took {elapsed:.1f}s"

    output = details.output
    assert output.status == "failed"
    feedback = output.feedback
    assert feedback.total == 14
    assert feedback.example.input == "(10,5)"
    assert feedback.example.expected == "5"
    assert feedback.example.actual == "10"
    assert feedback.message == "Have you subtracted the 2nd parameter?"

    # Brute-force re-evaluation of the fragment over the generated suite.
    rows = [tuple(v.data for v in case.args) for case in details.suite.cases]
    brute_passes = [_direct_eval("return a", row) == row[0] - row[1] for row in rows]
    assert feedback.succeeded == sum(brute_passes)
    assert feedback.succeeded == 1 + sum(1 for _, b in rows[4:] if b == 0)
    # Among predefined rows exactly (12,0) passes.
    assert [row for row, ok in zip(rows[:4], brute_passes[:4]) if ok] == [(12, 0)]
    _report("figure-2 reproduction")


def test_c2_score_identity():
    """score == succeeded/total to 1e-6 over 1000 random vectors, and the
    2-of-14 pair lands within 1e-6 of 0.14285715."""
    rng = random.Random(1234)
    for _ in range(1000):
        total = rng.randint(1, 60)
        passes = [rng.random() < 0.5 for _ in range(total)]
        score = compute_score(passes)
        assert abs(score - sum(passes) / total) < 1e-6
    assert abs(compute_score([True] * 2 + [False] * 12) - 0.14285715) < 1e-6
    _report("score identity")


def test_c3_solution_self_consistency(store, corpus):
    """Grading each sample task's own solution scores 1.0; the corpus
    spans zero-argument, float-return and str-return tasks."""
    assert len(corpus) >= 5
    kinds = {doc["spec"]["return"] for _, doc in corpus}
    assert {"int", "float", "str"} <= kinds
    assert any(doc["spec"]["args"] == [] for _, doc in corpus)
    for tid, doc in corpus:
        config = validate_config(doc)
        store.create_task("unit-testing", "python", config, tid)
        task = store.load_task(tid)
        output = run_pipeline(task, Submission("self", dict(config.solution.fields)))
        assert output.status == "success", (tid, output.to_document())
        assert output.feedback.score == 1.0
    _report("solution self-consistency over corpus")


def test_c4_oracle_equivalence(sub_task):
    """For 20 seeds the engine's per-test pass vector for "return a"
    equals direct re-execution of the fragment per test row."""
    for seed in range(20):
        details = run_pipeline_details(
            sub_task, Submission(f"s{seed:03d}", {"f1": "return a"}), seed=seed
        )
        rows = [tuple(v.data for v in case.args) for case in details.suite.cases]
        oracle = [_direct_eval("return a", row) == row[0] - row[1] for row in rows]
        expected = [b == 0 for _, b in rows]
        assert oracle == expected
        assert list(details.passes) == oracle, f"seed {seed}"
    _report("oracle equivalence across 20 seeds")


def test_c5_wildcard_feedback(sub_task):
    """No hint when the first failing answer has no matching key; the
    wildcard hint fires on the negative-input case."""
    plus = run_pipeline(sub_task, Submission("s010", {"f1": "return a + b"}),
                        seed=PINNED_SEED)
    assert plus.status == "failed"
    assert plus.feedback.example.input == "(10,5)"
    assert plus.feedback.example.actual == "15"
    assert plus.feedback.message is None

    engineered = "return a - b if a >= 0 else 0"
    neg = run_pipeline(sub_task, Submission("s011", {"f1": engineered}),
                       seed=PINNED_SEED)
    assert neg.status == "failed"
    assert neg.feedback.example.input == "(-1,2)"
    assert neg.feedback.message == "Have you considered negative parameters?"
    _report("wildcard feedback")


def _no_runner_processes_left():
    for cmdline in glob.glob("/proc/[0-9]*/cmdline"):
        try:
            args = Path(cmdline).read_bytes().split(b"\0")
        except OSError:
            continue
        if any(b"pyharness.py" in part for part in args):
            return False
    return True


def test_c6_safety_suite(sub_task, store, fig4_doc):
    """Hostile submissions: infinite loop, output flood, solution theft."""
    wall = 3.0
    options = GradeOptions(
        limits=Limits(wall_time=wall, memory=512 * 1024 * 1024,
                      output_bytes=16384, max_processes=16),
        per_test_time=0.15,
    )

    # (a) infinite loop: bounded response, nothing left running
    start = time.monotonic()
    looped = run_pipeline(sub_task, Submission("evil1", {"f1": "while True: pass"}),
                          seed=1, options=options)
    assert time.monotonic() - start < wall + 5.0
    assert looped.status in ("failed", "error")
    time.sleep(0.2)
    assert _no_runner_processes_left()

    # (b) flood: ten million printed characters neither corrupt results
    # nor leak into the response
    flood = run_pipeline(
        sub_task,
        Submission("evil2", {"f1": 'print("x" * 10_000_000)\nreturn a - b'}),
        seed=1, options=options,
    )
    assert flood.status == "success"
    assert flood.feedback.score == 1.0
    assert len(flood.to_json().encode()) < 16384

    # (c) solution theft attempt fails and leaks nothing
    if sandbox_user() is None:
        pytest.skip("solution-secrecy enforcement needs a privilege drop (root)")
    solution_path = store.root / "sub" / "solution.json"
    thief = f"return open({str(solution_path)!r}).read()"
    details = run_pipeline_details(
        sub_task, Submission("evil3", {"f1": thief}), seed=1, options=options
    )
    assert details.output.status == "failed"
    assert all(o.verdict in ("exception", "error") for o in details.outcomes)
    serialized = details.output.to_json()
    assert "return a - b" not in serialized
    _report("safety suite (loop, flood, theft)")


def test_c7_determinism(capsys, tmp_path, fig4_doc):
    """Identical (task, submission, seed) twice -> identical bytes."""
    task_dir = str(tmp_path / "tasks")
    config_path = tmp_path / "sub.json"
    config_path.write_text(json.dumps(fig4_doc), encoding="utf-8")
    assert main(["--task-dir", task_dir, "create",
                 "--config", str(config_path), "--id", "sub"]) == 0
    capsys.readouterr()
    submission_path = tmp_path / "attempt.json"
    submission_path.write_text(FIG2_INPUT, encoding="utf-8")
    args = ["--task-dir", task_dir, "grade", "--task", "sub",
            "--submission", str(submission_path), "--seed", str(PINNED_SEED)]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second and first
    _report("byte-identical determinism")


def test_c8_wire_format_goldens(sub_task, monkeypatch, tmp_path, capsys, fig4_doc):
    """data.csv, data.res, solution.res and the inner documents match the
    pinned fixtures byte for byte."""
    scratch_root = "/tmp" + str(tmp_path / "wire")
    monkeypatch.setenv("GRADER_SCRATCH_DIR", scratch_root)
    monkeypatch.setenv("GRADER_KEEP_SCRATCH", "1")
    output = run_pipeline(sub_task, Submission("s001", {"f1": "return a"}),
                          seed=PINNED_SEED)
    monkeypatch.delenv("GRADER_KEEP_SCRATCH")
    root = Path(scratch_root)
    student = next(iter(root.glob("grader-student-*")))
    teacher = next(iter(root.glob("grader-teacher-*")))
    assert (student / "data.csv").read_bytes() == (GOLDEN / "data.csv").read_bytes()
    assert (student / "data.res").read_bytes() == (GOLDEN / "data.res").read_bytes()
    assert (teacher / "solution.res").read_bytes() == (GOLDEN / "solution.res").read_bytes()
    assert output.to_json() + "\n" == (GOLDEN / "output.json").read_text()
    assert FIG2_INPUT == (GOLDEN / "input.json").read_text()
    _report("wire-format goldens")


def test_c9_http_round_trip(tmp_path, fig4_doc):
    """Scenario 1 then scenario 2 against a cold store over HTTP."""
    client = TestClient(create_app(TaskStore(tmp_path / "tasks")))
    created = client.post("/api/tasks", json={
        "type": "unit-testing", "language": "python",
        "config": fig4_doc, "id": "sub",
    })
    assert created.status_code == 201
    task_id = created.json()["task_id"]

    response = client.post("/api/execute", json={"tid": task_id, "input": FIG2_INPUT})
    assert response.status_code == 200
    envelope = response.json()
    assert set(envelope) == {"tid", "status", "output"}
    assert envelope["tid"] == task_id
    assert envelope["status"] == "success"
    inner = json.loads(envelope["output"])
    assert inner["tid"] == "s001"
    assert inner["status"] == "failed"
    assert inner["feedback"]["example"] == {
        "input": "(10,5)", "expected": "5", "actual": "10"
    }

    assert client.post("/api/execute",
                       json={"tid": "nope", "input": FIG2_INPUT}).status_code == 404
    _report("HTTP create-then-execute round trip")
