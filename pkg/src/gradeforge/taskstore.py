"""On-disk store of compiled, immutable task packages.

One directory per task under a configurable root.  A package is written
to a staging directory and renamed into place, so a crashed creation
never leaves a half-visible task; a content digest over the canonical
configuration lets the loader detect tampering or truncation.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import secrets
import shutil
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .codegen import (
    SUPPORTED_LANGUAGES,
    CodeTemplate,
    UnsupportedLanguage,
    fill_template,
    make_template,
    parse_template,
)
from .config import (
    FunctionSpec,
    Solution,
    TaskConfig,
    TestPlan,
    config_to_document,
    validate_config,
)

log = logging.getLogger(__name__)

TASK_DIR_ENV = "GRADER_TASK_DIR"

TASK_TYPE_UNIT_TESTING = "unit-testing"

_TASK_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*\Z")

_PACKAGE_FILES = (
    "manifest.json",
    "spec.json",
    "test.json",
    "solution.json",
    "template.txt",
    "teacher.py",
)

# Only the engine may read compiled packages; graded code runs as an
# unprivileged user and must not see solutions or test plans.
_PRIVATE_MODE = 0o600
_DIR_MODE = 0o700


class TaskStoreError(Exception):
    pass


class DuplicateId(TaskStoreError):
    pass


class UnsupportedType(TaskStoreError):
    pass


class InvalidTaskId(TaskStoreError):
    pass


class NotFound(TaskStoreError):
    pass


class CorruptPackage(TaskStoreError):
    pass


class SolutionLoadError(TaskStoreError):
    pass


@dataclass(frozen=True)
class Manifest:
    task_id: str
    task_type: str
    language: str
    created_at: str
    config_digest: str

    def to_document(self) -> dict:
        return {
            "task_id": self.task_id,
            "task_type": self.task_type,
            "language": self.language,
            "created_at": self.created_at,
            "config_digest": self.config_digest,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "Manifest":
        try:
            return cls(
                task_id=doc["task_id"],
                task_type=doc["task_type"],
                language=doc["language"],
                created_at=doc["created_at"],
                config_digest=doc["config_digest"],
            )
        except (KeyError, TypeError) as exc:
            raise CorruptPackage(f"malformed manifest: {exc}") from None


@dataclass(frozen=True)
class TaskPackage:
    manifest: Manifest
    spec: FunctionSpec
    plan: TestPlan
    solution: Solution
    template: CodeTemplate
    teacher_source: str
    spec_json: str
    path: Path

    @property
    def task_id(self) -> str:
        return self.manifest.task_id

    @property
    def language(self) -> str:
        return self.manifest.language


def config_digest(config: TaskConfig) -> str:
    """Content hash of the canonical configuration document; stable under
    key reordering of the input JSON."""
    canonical = json.dumps(
        config_to_document(config), sort_keys=True, separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _dump(part) -> str:
    return json.dumps(part, indent=2, ensure_ascii=False) + "\n"


class TaskStore:
    """Directory-per-task package store."""

    def __init__(self, root: str | Path | None = None):
        if root is None:
            root = os.environ.get(TASK_DIR_ENV) or os.path.join(
                tempfile.gettempdir(), "grader-tasks"
            )
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def create_task(
        self,
        task_type: str,
        language: str,
        config: TaskConfig,
        requested_id: str | None = None,
    ) -> Manifest:
        """Compile a validated config into an immutable package.

        The teacher source is smoke-loaded (compiled) now so a task whose
        solution cannot run is refused instead of shipped.
        """
        if task_type != TASK_TYPE_UNIT_TESTING:
            raise UnsupportedType(f"unsupported task type {task_type!r}")
        if language not in SUPPORTED_LANGUAGES:
            raise UnsupportedLanguage(language)
        if requested_id is not None and not _TASK_ID_RE.match(requested_id):
            raise InvalidTaskId(
                f"task id {requested_id!r} must match {_TASK_ID_RE.pattern}"
            )

        template = make_template(config.spec, language)
        teacher_source = fill_template(template, config.solution.as_dict())
        try:
            compile(teacher_source, "<teacher>", "exec")
        except (SyntaxError, ValueError) as exc:
            raise SolutionLoadError(f"teacher source does not load: {exc}") from None

        task_id = requested_id or secrets.token_hex(16)
        target = self.root / task_id
        if target.exists():
            raise DuplicateId(f"task {task_id!r} already exists")

        document = config_to_document(config)
        manifest = Manifest(
            task_id=task_id,
            task_type=task_type,
            language=language,
            created_at=datetime.now(timezone.utc).isoformat(),
            config_digest=config_digest(config),
        )

        staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.root))
        try:
            contents = {
                "manifest.json": _dump(manifest.to_document()),
                "spec.json": _dump(document["spec"]),
                "test.json": _dump(document["test"]),
                "solution.json": _dump(document["solution"]),
                "template.txt": template.skeleton,
                "teacher.py": teacher_source,
            }
            for name, text in contents.items():
                path = staging / name
                path.write_text(text, encoding="utf-8")
                os.chmod(path, _PRIVATE_MODE)
            os.chmod(staging, _DIR_MODE)
            try:
                os.rename(staging, target)
            except OSError:
                raise DuplicateId(f"task {task_id!r} already exists") from None
        except BaseException:
            if staging.exists():
                shutil.rmtree(staging, ignore_errors=True)
            raise
        return manifest

    def _task_dir(self, task_id: str) -> Path:
        if not _TASK_ID_RE.match(task_id or ""):
            raise NotFound(f"no task {task_id!r}")
        return self.root / task_id

    def load_task(self, task_id: str) -> TaskPackage:
        path = self._task_dir(task_id)
        if not path.is_dir():
            raise NotFound(f"no task {task_id!r}")
        texts: dict[str, str] = {}
        for name in _PACKAGE_FILES:
            try:
                texts[name] = (path / name).read_text(encoding="utf-8")
            except OSError as exc:
                raise CorruptPackage(f"task {task_id!r}: cannot read {name}: {exc}") from None
        try:
            manifest = Manifest.from_document(json.loads(texts["manifest.json"]))
            spec_doc = json.loads(texts["spec.json"])
            test_doc = json.loads(texts["test.json"])
            solution_doc = json.loads(texts["solution.json"])
        except json.JSONDecodeError as exc:
            raise CorruptPackage(f"task {task_id!r}: {exc}") from None

        config = validate_config(
            {"spec": spec_doc, "test": test_doc, "solution": solution_doc}
        )
        if config_digest(config) != manifest.config_digest:
            raise CorruptPackage(f"task {task_id!r}: config digest mismatch")
        if manifest.task_id != task_id:
            raise CorruptPackage(
                f"task {task_id!r}: manifest names {manifest.task_id!r}"
            )

        template = parse_template(manifest.language, texts["template.txt"])
        expected_teacher = fill_template(template, config.solution.as_dict())
        if texts["teacher.py"] != expected_teacher:
            raise CorruptPackage(
                f"task {task_id!r}: teacher source does not match template + solution"
            )
        return TaskPackage(
            manifest=manifest,
            spec=config.spec,
            plan=config.test,
            solution=config.solution,
            template=template,
            teacher_source=texts["teacher.py"],
            spec_json=texts["spec.json"],
            path=path,
        )

    def list_tasks(self) -> list[Manifest]:
        manifests = []
        for entry in self.root.iterdir():
            if not entry.is_dir() or entry.name.startswith("."):
                continue
            try:
                doc = json.loads((entry / "manifest.json").read_text(encoding="utf-8"))
                manifests.append(Manifest.from_document(doc))
            except (OSError, json.JSONDecodeError, CorruptPackage) as exc:
                log.warning("skipping unreadable package %s: %s", entry.name, exc)
        manifests.sort(key=lambda m: (m.created_at, m.task_id))
        return manifests
