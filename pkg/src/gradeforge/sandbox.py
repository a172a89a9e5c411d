"""Resource-limited execution of runner processes in scratch directories.

Isolation is OS-level: a fresh scratch directory per phase, a cleared
environment, rlimits on memory / processes / CPU / file size, a wall
clock kill on the whole process group, and a privilege drop to an
unprivileged user when the engine runs as root (which is what makes the
solution files, kept at mode 0o600 under the task store, unreadable by
graded code).  Full VM/container isolation is intentionally out of
scope; deployments needing it can front this interface with one.
"""

from __future__ import annotations

import os
import pwd
import resource
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .taskstore import TaskPackage

SCRATCH_DIR_ENV = "GRADER_SCRATCH_DIR"
KEEP_SCRATCH_ENV = "GRADER_KEEP_SCRATCH"
SANDBOX_USER_ENV = "GRADER_SANDBOX_USER"
PYTHON_ENV = "GRADER_PYTHON"

# Written files are separately capped (results are tiny); this only
# contains runaway writers.
_FSIZE_LIMIT = 64 * 1024 * 1024

HARNESS_FILENAME = "pyharness.py"
SPEC_FILENAME = "spec.json"

STUDENT_PHASE = "student"
TEACHER_PHASE = "teacher"

# Contents that must never reach a student-phase scratch directory.
_STUDENT_FORBIDDEN = {"solution.json", "test.json", "teacher.py"}


class SetupError(RuntimeError):
    """Sandbox plumbing failed (as opposed to the child failing)."""


@dataclass(frozen=True)
class Limits:
    wall_time: float = 30.0
    memory: int = 512 * 1024 * 1024
    output_bytes: int = 16384
    max_processes: int = 16

    def __post_init__(self) -> None:
        for name in ("wall_time", "memory", "output_bytes", "max_processes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"limit {name} must be strictly positive")


@dataclass(frozen=True)
class SandboxOutcome:
    status: str  # completed | timeout | overflow | setup-error
    exit_code: int | None
    stdout_bytes: bytes
    stderr_bytes: bytes
    duration: float

    @property
    def stdout_text(self) -> str:
        return self.stdout_bytes.decode("utf-8", errors="replace")

    @property
    def stderr_text(self) -> str:
        return self.stderr_bytes.decode("utf-8", errors="replace")


def sandbox_user() -> tuple[int, int] | None:
    """(uid, gid) to drop to, or None when not running with privileges."""
    if os.geteuid() != 0:
        return None
    name = os.environ.get(SANDBOX_USER_ENV, "nobody")
    try:
        entry = pwd.getpwnam(name)
    except KeyError:
        return None
    return entry.pw_uid, entry.pw_gid


def runner_python() -> str:
    """Interpreter used inside the sandbox; must be executable by the
    sandbox user, so prefer the system python over private venvs."""
    override = os.environ.get(PYTHON_ENV)
    if override:
        return override
    return shutil.which("python3") or sys.executable


def _child_env() -> dict[str, str]:
    return {
        "PATH": "/usr/local/bin:/usr/bin:/bin",
        "LANG": "C.UTF-8",
        "LC_ALL": "C.UTF-8",
    }


def _drain(stream, cap: int, sink: dict, key: str) -> None:
    kept = bytearray()
    total = 0
    try:
        while True:
            chunk = stream.read(65536)
            if not chunk:
                break
            total += len(chunk)
            if len(kept) < cap:
                kept.extend(chunk[: cap - len(kept)])
    except ValueError:
        pass  # pipe force-closed after a group kill
    sink[key] = (bytes(kept), total)


def execute(
    command: list[str],
    workdir: str | Path,
    limits: Limits,
    visible_files: list[str] | None = None,
) -> SandboxOutcome:
    """Run `command` confined to `workdir` under `limits`.

    A nonzero exit of the child is a normal completed outcome; only
    engine-side failures raise SetupError.  `visible_files`, when given,
    is checked against the directory as a pre-flight guard.
    """
    workdir = Path(workdir)
    if not workdir.is_dir():
        raise SetupError(f"workdir {workdir} does not exist")
    if visible_files is not None:
        present = sorted(p.name for p in workdir.iterdir())
        if present != sorted(visible_files):
            raise SetupError(
                f"workdir contents {present} differ from expected {sorted(visible_files)}"
            )

    drop_to = sandbox_user()
    cpu_seconds = max(1, int(limits.wall_time) + 1)

    def set_child_limits() -> None:
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
        resource.setrlimit(resource.RLIMIT_AS, (limits.memory, limits.memory))
        resource.setrlimit(
            resource.RLIMIT_NPROC, (limits.max_processes, limits.max_processes)
        )
        resource.setrlimit(resource.RLIMIT_CPU, (cpu_seconds, cpu_seconds + 1))
        resource.setrlimit(resource.RLIMIT_FSIZE, (_FSIZE_LIMIT, _FSIZE_LIMIT))
        if drop_to is not None:
            uid, gid = drop_to
            os.setgid(gid)
            os.setgroups([])
            os.setuid(uid)

    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            command,
            cwd=str(workdir),
            env=_child_env(),
            stdin=subprocess.DEVNULL,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            preexec_fn=set_child_limits,
            start_new_session=True,
        )
    except (OSError, subprocess.SubprocessError) as exc:
        raise SetupError(f"failed to spawn {command[0]!r}: {exc}") from exc

    captured: dict[str, tuple[bytes, int]] = {}
    readers = [
        threading.Thread(
            target=_drain, args=(proc.stdout, limits.output_bytes, captured, "out")
        ),
        threading.Thread(
            target=_drain, args=(proc.stderr, limits.output_bytes, captured, "err")
        ),
    ]
    for reader in readers:
        reader.start()

    timed_out = False
    try:
        proc.wait(timeout=limits.wall_time)
    except subprocess.TimeoutExpired:
        timed_out = True
        _kill_group(proc.pid)
        proc.wait()

    for reader in readers:
        reader.join(timeout=2.0)
    if any(reader.is_alive() for reader in readers):
        # An escaped descendant is keeping a pipe open; cut it loose.
        _kill_group(proc.pid)
        proc.stdout.close()
        proc.stderr.close()
        for reader in readers:
            reader.join()

    duration = time.monotonic() - start
    stdout, out_total = captured.get("out", (b"", 0))
    stderr, err_total = captured.get("err", (b"", 0))
    overflowed = out_total > limits.output_bytes or err_total > limits.output_bytes

    if timed_out:
        status = "timeout"
    elif overflowed:
        status = "overflow"
    else:
        status = "completed"
    return SandboxOutcome(
        status=status,
        exit_code=proc.returncode if not timed_out else None,
        stdout_bytes=stdout,
        stderr_bytes=stderr,
        duration=duration,
    )


def _kill_group(pid: int) -> None:
    try:
        os.killpg(pid, signal.SIGKILL)
    except ProcessLookupError:
        pass


def scratch_root() -> str:
    return os.environ.get(SCRATCH_DIR_ENV) or tempfile.gettempdir()


def keep_scratch() -> bool:
    return os.environ.get(KEEP_SCRATCH_ENV) == "1"


def harness_source() -> str:
    return resources.files("gradeforge.runner").joinpath(HARNESS_FILENAME).read_text(
        encoding="utf-8"
    )


def make_scratch(
    task: "TaskPackage",
    phase: str,
    files: Mapping[str, str],
) -> Path:
    """Create a fresh per-phase scratch directory.

    Both phases get the harness and the public signature file; teacher
    scratches additionally get the teacher source.  Solution and test
    configuration never enter a student scratch — passing them in
    `files` is refused outright.
    """
    if phase not in (STUDENT_PHASE, TEACHER_PHASE):
        raise SetupError(f"unknown phase {phase!r}")
    if phase == STUDENT_PHASE:
        leaked = _STUDENT_FORBIDDEN.intersection(files)
        if leaked:
            raise SetupError(f"refusing to expose {sorted(leaked)} to student code")

    root = scratch_root()
    try:
        if not os.path.isdir(root):
            os.makedirs(root, exist_ok=True)
            # The sandbox user resolves absolute paths through the root,
            # so it must be traversable (not listable) by everyone.
            os.chmod(root, 0o711)
        path = Path(tempfile.mkdtemp(prefix=f"grader-{phase}-", dir=root))
    except OSError as exc:
        raise SetupError(f"cannot create scratch directory under {root}: {exc}") from exc

    contents = dict(files)
    contents[HARNESS_FILENAME] = harness_source()
    contents[SPEC_FILENAME] = task.spec_json
    if phase == TEACHER_PHASE:
        contents["teacher.py"] = task.teacher_source

    try:
        for name, text in contents.items():
            target = path / name
            target.write_text(text, encoding="utf-8")
            os.chmod(target, 0o644)
        # The sandboxed child (possibly another uid) writes results here.
        os.chmod(path, 0o777)
    except OSError as exc:
        raise SetupError(f"cannot populate scratch directory {path}: {exc}") from exc
    return path


def cleanup_scratch(path: str | Path) -> None:
    if keep_scratch():
        return
    shutil.rmtree(path, ignore_errors=True)
