"""In-sandbox test harness for Python tasks.

Runs alone inside a scratch directory: loads the filled source file,
calls the task function once per CSV row and writes one result line per
row.  Student mode writes verdict-tagged lines (data.res), teacher mode
writes bare rendered answers (solution.res).

This file must stay self-contained: nothing outside the Python standard
library may be imported, because the scratch directory is all the
sandboxed process gets to see.
"""

import argparse
import csv
import io
import json
import re
import signal
import sys
from contextlib import redirect_stderr, redirect_stdout

INT_RE = re.compile(r"-?[0-9]+\Z")
FLOAT_RE = re.compile(r"-?(?:[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?|inf|nan)\Z")


class TestTimeout(Exception):
    pass


def _on_alarm(signum, frame):
    raise TestTimeout()


def render(value, sem_type):
    """Canonical rendering; must match the engine's renderer byte for byte."""
    if sem_type == "int":
        if type(value) is not int:
            raise TypeError("expected int, got %s" % type(value).__name__)
        return str(value)
    if sem_type == "float":
        if type(value) is bool or not isinstance(value, (int, float)):
            raise TypeError("expected float, got %s" % type(value).__name__)
        return repr(float(value))
    if sem_type == "bool":
        if type(value) is not bool:
            raise TypeError("expected bool, got %s" % type(value).__name__)
        return "true" if value else "false"
    if sem_type == "str":
        if type(value) is not str:
            raise TypeError("expected str, got %s" % type(value).__name__)
        out = ['"']
        for ch in value:
            if ch == "\\":
                out.append("\\\\")
            elif ch == '"':
                out.append('\\"')
            elif ch == "\n":
                out.append("\\n")
            elif ch == "\t":
                out.append("\\t")
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    raise ValueError("unknown type tag %r" % sem_type)


def parse_cell(text, sem_type):
    """CSV cells: canonical text for scalars, raw payload for strings."""
    if sem_type == "int":
        if not INT_RE.match(text):
            raise ValueError("bad int cell %r" % text)
        return int(text)
    if sem_type == "float":
        if not FLOAT_RE.match(text):
            raise ValueError("bad float cell %r" % text)
        return float(text)
    if sem_type == "bool":
        if text == "true":
            return True
        if text == "false":
            return False
        raise ValueError("bad bool cell %r" % text)
    if sem_type == "str":
        return text
    raise ValueError("unknown type tag %r" % sem_type)


def first_line(exc):
    text = str(exc)
    line = text.splitlines()[0] if text else ""
    name = type(exc).__name__
    return "%s: %s" % (name, line) if line else name


def load_function(source_path, name):
    """Compile and exec the source; returns (function, None) or
    (None, diagnostic) when the module cannot be loaded."""
    try:
        with open(source_path, "r", encoding="utf-8") as f:
            source = f.read()
        code = compile(source, source_path, "exec")
        namespace = {"__name__": "task_module"}
        sink = io.StringIO()
        with redirect_stdout(sink), redirect_stderr(sink):
            exec(code, namespace)
    except BaseException as exc:
        return None, first_line(exc)
    func = namespace.get(name)
    if not callable(func):
        return None, "function %r is not defined" % name
    return func, None


def run_one(func, args, return_type, per_test_time, mode):
    """One test: returns the result line (without newline)."""
    sink = io.StringIO()
    signal.setitimer(signal.ITIMER_REAL, per_test_time)
    try:
        with redirect_stdout(sink), redirect_stderr(sink):
            result = func(*args)
    except TestTimeout:
        return "timeout" if mode == "student" else "#timeout"
    except Exception as exc:
        detail = first_line(exc)
        return "exception:%s" % detail if mode == "student" else "#exception: %s" % detail
    except BaseException as exc:
        tag = type(exc).__name__
        return "error:%s" % tag if mode == "student" else "#error: %s" % tag
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)

    try:
        rendered = render(result, return_type)
    except TypeError as exc:
        detail = "wrong-type: %s" % exc
        return "error:%s" % detail if mode == "student" else "#error: %s" % detail
    return "checked:%s" % rendered if mode == "student" else rendered


def run_tests(source_path, spec_path, csv_path, out_path, mode, per_test_time):
    with open(spec_path, "r", encoding="utf-8") as f:
        spec = json.load(f)
    name = spec["name"]
    arg_types = [arg["type"] for arg in spec["args"]]
    return_type = spec["return"]

    signal.signal(signal.SIGALRM, _on_alarm)
    with open(out_path, "w", encoding="utf-8") as out:
        func, diagnostic = load_function(source_path, name)
        if func is None:
            out.write("load-error:%s\n" % diagnostic)
            return
        with open(csv_path, "r", encoding="utf-8", newline="") as f:
            for row in csv.reader(f):
                if len(row) != len(arg_types):
                    raise RuntimeError(
                        "row has %d cells, spec has %d arguments"
                        % (len(row), len(arg_types))
                    )
                args = [parse_cell(cell, t) for cell, t in zip(row, arg_types)]
                out.write(run_one(func, args, return_type, per_test_time, mode) + "\n")
                out.flush()


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--source", required=True)
    parser.add_argument("--spec", required=True)
    parser.add_argument("--csv", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--mode", required=True, choices=["student", "teacher"])
    parser.add_argument("--per-test-time", type=float, default=1.0)
    args = parser.parse_args(argv)
    try:
        run_tests(args.source, args.spec, args.csv, args.out, args.mode,
                  args.per_test_time)
    except Exception as exc:
        print("harness failure: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
