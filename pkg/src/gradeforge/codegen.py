"""Code templates: a function skeleton per language with named placeholders.

The same template is filled twice per grading run, once with the learner's
fragments (student code) and once with the instructor's (teacher code).
Fragments go in verbatim apart from re-indentation; isolation at
execution time is what makes that safe, not fragment vetting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .config import FunctionSpec

SUPPORTED_LANGUAGES = ("python",)

BODY_FIELD = "f1"

_MARKER_RE = re.compile(r"([ \t]*)\{\{([A-Za-z_][A-Za-z0-9_]*)\}\}[ \t]*\Z")


class UnsupportedLanguage(ValueError):
    def __init__(self, language: str):
        self.language = language
        super().__init__(f"unsupported language {language!r}")


class MissingField(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no fragment provided for placeholder {name!r}")


@dataclass(frozen=True)
class PlaceholderSpec:
    name: str
    indent: int


@dataclass(frozen=True)
class CodeTemplate:
    language: str
    skeleton: str
    placeholders: tuple[PlaceholderSpec, ...]

    def placeholder_names(self) -> list[str]:
        return [p.name for p in self.placeholders]


def make_template(spec: FunctionSpec, language: str) -> CodeTemplate:
    """Build the skeleton declaring the task's function, with the body
    held by the "f1" placeholder one indentation level inside."""
    if language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguage(language)
    params = ", ".join(spec.arg_names)
    skeleton = f"def {spec.name}({params}):\n    {{{{{BODY_FIELD}}}}}\n"
    return CodeTemplate(language, skeleton, (PlaceholderSpec(BODY_FIELD, 4),))


def parse_template(language: str, skeleton: str) -> CodeTemplate:
    """Recover a CodeTemplate from stored skeleton text by scanning for
    {{name}} marker lines (used when loading task packages)."""
    if language not in SUPPORTED_LANGUAGES:
        raise UnsupportedLanguage(language)
    placeholders = []
    seen = set()
    for line in skeleton.split("\n"):
        m = _MARKER_RE.match(line)
        if m and m.group(2) not in seen:
            seen.add(m.group(2))
            placeholders.append(PlaceholderSpec(m.group(2), len(m.group(1))))
    return CodeTemplate(language, skeleton, tuple(placeholders))


def fill_template(template: CodeTemplate, fields: Mapping[str, str]) -> str:
    """Substitute every placeholder with its fragment, re-indenting each
    fragment line to the placeholder's column."""
    by_name = {p.name: p for p in template.placeholders}
    for placeholder in template.placeholders:
        if placeholder.name not in fields:
            raise MissingField(placeholder.name)
    out_lines: list[str] = []
    for line in template.skeleton.split("\n"):
        m = _MARKER_RE.match(line)
        if m and m.group(2) in by_name:
            placeholder = by_name[m.group(2)]
            prefix = " " * placeholder.indent
            for fragment_line in fields[placeholder.name].split("\n"):
                out_lines.append(prefix + fragment_line)
        else:
            out_lines.append(line)
    return "\n".join(out_lines)
