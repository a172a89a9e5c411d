import json
import os
import shutil
import uuid
from pathlib import Path

import pytest

from gradeforge.config import parse_task_config
from gradeforge.taskstore import TaskStore

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session", autouse=True)
def scratch_root_env():
    """Scratch directories live under /tmp directly: when the engine runs
    as root the sandboxed child resolves absolute paths as an unprivileged
    user, so every ancestor must be world-traversable (pytest tmp dirs are
    0700)."""
    root = f"/tmp/gradeforge-tests-{uuid.uuid4().hex[:12]}"
    old = os.environ.get("GRADER_SCRATCH_DIR")
    os.environ["GRADER_SCRATCH_DIR"] = root
    os.environ.pop("GRADER_KEEP_SCRATCH", None)
    yield root
    if old is None:
        os.environ.pop("GRADER_SCRATCH_DIR", None)
    else:
        os.environ["GRADER_SCRATCH_DIR"] = old
    shutil.rmtree(root, ignore_errors=True)


@pytest.fixture
def fig4_doc():
    return json.loads((FIXTURES / "fig4.json").read_text(encoding="utf-8"))


@pytest.fixture
def fig4_config(fig4_doc):
    return parse_task_config(json.dumps(fig4_doc))


@pytest.fixture
def store(tmp_path):
    return TaskStore(tmp_path / "tasks")


@pytest.fixture
def sub_task(store, fig4_config):
    store.create_task("unit-testing", "python", fig4_config, "sub")
    return store.load_task("sub")


# A small corpus of valid tasks covering every value type, zero-arity and
# awkward string payloads; each entry is (task_id, config document).
CORPUS = [
    (
        "sub",
        None,  # filled from fig4.json at fixture time
    ),
    (
        "answer",
        {
            "spec": {"name": "answer", "args": [], "return": "int"},
            "test": {"predefined": [{"data": "()"}], "random": {"n": 3, "args": []}},
            "solution": {"f1": "return 42"},
        },
    ),
    (
        "halve",
        {
            "spec": {
                "name": "halve",
                "args": [{"name": "x", "type": "float"}],
                "return": "float",
            },
            "test": {
                "predefined": [{"data": "(3.0)"}, {"data": "(-1.5)"}],
                "random": {"n": 5, "args": ["float(-2.5,2.5)"]},
            },
            "solution": {"f1": "return x / 2.0"},
        },
    ),
    (
        "shout",
        {
            "spec": {
                "name": "shout",
                "args": [{"name": "s", "type": "str"}],
                "return": "str",
            },
            "test": {
                "predefined": [{"data": '("ab")'}, {"data": '("a,\\"b")'}],
                "random": {"n": 4, "args": ["str(0,6)"]},
            },
            "solution": {"f1": "return s.upper()"},
        },
    ),
    (
        "is_even",
        {
            "spec": {
                "name": "is_even",
                "args": [{"name": "n", "type": "int"}],
                "return": "bool",
            },
            "test": {
                "predefined": [{"data": "(4)"}, {"data": "(7)"}],
                "random": {"n": 5, "args": ["int(-100,100)"]},
            },
            "solution": {"f1": "return n % 2 == 0"},
        },
    ),
    (
        "describe",
        {
            "spec": {
                "name": "describe",
                "args": [
                    {"name": "a", "type": "int"},
                    {"name": "f", "type": "float"},
                    {"name": "flag", "type": "bool"},
                    {"name": "s", "type": "str"},
                ],
                "return": "str",
            },
            "test": {
                "predefined": [{"data": '(2, 0.5, true, "x")'}],
                "random": {
                    "n": 3,
                    "args": ["int(0,5)", "float(0,1)", "bool()", "str(1,3)"],
                },
            },
            "solution": {"f1": "return s * a if flag else str(f)"},
        },
    ),
]


@pytest.fixture
def corpus(fig4_doc):
    return [(tid, doc if doc is not None else fig4_doc) for tid, doc in CORPUS]
