"""Typed values exchanged between the engine, test files and runners.

Every test input and every answer travels as text (CSV cells, result
files, feedback documents), so the rendering here is the canonical,
cross-component one: the in-sandbox runner re-implements it and a golden
fixture pins both sides to the same bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class SemType(str, Enum):
    """The closed set of value types supported by task signatures."""

    INT = "int"
    FLOAT = "float"
    BOOL = "bool"
    STR = "str"

    @classmethod
    def from_tag(cls, tag: str) -> "SemType":
        try:
            return cls(tag)
        except ValueError:
            raise ValueFormatError(f"unknown type tag {tag!r}") from None


class ValueFormatError(ValueError):
    """Text does not parse as a value of the requested type."""


@dataclass(frozen=True)
class Value:
    """One concrete typed value (a test argument or an answer)."""

    type: SemType
    data: int | float | bool | str

    def __post_init__(self) -> None:
        expected = {
            SemType.INT: int,
            SemType.FLOAT: float,
            SemType.BOOL: bool,
            SemType.STR: str,
        }[self.type]
        # bool is a subclass of int; keep the tags unambiguous.
        if type(self.data) is not expected:
            raise TypeError(
                f"payload {self.data!r} is not a {self.type.value}"
            )

    def render(self) -> str:
        return render_value(self)


_INT_RE = re.compile(r"-?[0-9]+\Z")
_FLOAT_RE = re.compile(
    r"-?(?:[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?|inf|nan)\Z"
)

_STR_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}
_STR_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


def render_value(value: Value) -> str:
    """Canonical text form: ints in decimal, floats as the shortest
    round-tripping decimal, bools as true/false, strings double-quoted
    with backslash escapes for quote, backslash, newline and tab."""
    if value.type is SemType.INT:
        return str(value.data)
    if value.type is SemType.FLOAT:
        return repr(value.data)
    if value.type is SemType.BOOL:
        return "true" if value.data else "false"
    return render_str(value.data)


def render_str(text: str) -> str:
    out = ['"']
    for ch in text:
        out.append(_STR_ESCAPES.get(ch, ch))
    out.append('"')
    return "".join(out)


def parse_value(text: str, sem_type: SemType) -> Value:
    """Inverse of render_value; raises ValueFormatError on anything that
    is not a canonical rendering (modulo integer-looking floats, which
    instructors commonly write in predefined float data)."""
    if sem_type is SemType.INT:
        if not _INT_RE.match(text):
            raise ValueFormatError(f"{text!r} is not an int")
        return Value(SemType.INT, int(text))
    if sem_type is SemType.FLOAT:
        if not _FLOAT_RE.match(text):
            raise ValueFormatError(f"{text!r} is not a float")
        return Value(SemType.FLOAT, float(text))
    if sem_type is SemType.BOOL:
        if text == "true":
            return Value(SemType.BOOL, True)
        if text == "false":
            return Value(SemType.BOOL, False)
        raise ValueFormatError(f"{text!r} is not a bool (true/false)")
    return Value(SemType.STR, parse_str(text))


def parse_str(text: str) -> str:
    if len(text) < 2 or not text.startswith('"') or not text.endswith('"'):
        raise ValueFormatError(f"{text!r} is not a quoted string")
    out: list[str] = []
    i = 1
    end = len(text) - 1
    while i < end:
        ch = text[i]
        if ch == "\\":
            if i + 1 >= end:
                raise ValueFormatError(f"dangling escape in {text!r}")
            esc = text[i + 1]
            if esc not in _STR_UNESCAPES:
                raise ValueFormatError(f"unknown escape \\{esc} in {text!r}")
            out.append(_STR_UNESCAPES[esc])
            i += 2
        elif ch == '"':
            raise ValueFormatError(f"unescaped quote inside {text!r}")
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def values_equal(a: Value, b: Value, *, float_tolerance: float | None = 1e-6) -> bool:
    """Typed equality used when comparing answers: exact for int, bool
    and str; floats within a relative tolerance unless it is disabled."""
    if a.type is not b.type:
        return False
    if a.type is SemType.FLOAT and float_tolerance is not None:
        x, y = a.data, b.data
        if x == y:
            return True
        return abs(x - y) <= float_tolerance * max(1.0, abs(x), abs(y))
    return a.data == b.data
