"""Task configuration: schema validation, the generator DSL and tuple parsing.

A task is declared as one JSON document with three parts (spec, test,
solution).  Everything the rest of the engine consumes is validated here,
so downstream modules can assume well-formed plans.
"""

from __future__ import annotations

import json
import keyword
import re
from dataclasses import dataclass

from .values import SemType, Value, ValueFormatError, parse_value

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

WILDCARD_KEY = "**"

SOLUTION_FIELD = "f1"


class SchemaError(ValueError):
    """Configuration document violates the schema; `path` locates the fault."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class DslError(ValueError):
    """Generator expression text is not part of the DSL."""


class TupleError(ValueError):
    """Argument tuple text cannot be parsed against the declared types."""


# ---------------------------------------------------------------------------
# Generator expressions


@dataclass(frozen=True)
class IntRange:
    """int(lo,hi): uniform integer, both bounds inclusive."""

    lo: int
    hi: int

    kind = SemType.INT

    def dsl_text(self) -> str:
        return f"int({self.lo},{self.hi})"


@dataclass(frozen=True)
class FloatRange:
    """float(lo,hi): uniform, lo inclusive, hi exclusive."""

    lo: float
    hi: float

    kind = SemType.FLOAT

    def dsl_text(self) -> str:
        return f"float({self.lo!r},{self.hi!r})"


@dataclass(frozen=True)
class BoolCoin:
    """bool(): fair coin."""

    kind = SemType.BOOL

    def dsl_text(self) -> str:
        return "bool()"


@dataclass(frozen=True)
class StrGen:
    """str(minlen,maxlen): uniform length, lowercase ASCII letters."""

    min_len: int
    max_len: int

    kind = SemType.STR

    def dsl_text(self) -> str:
        return f"str({self.min_len},{self.max_len})"


GeneratorExpr = IntRange | FloatRange | BoolCoin | StrGen

_DSL_RE = re.compile(r"\s*(int|float|bool|str)\s*\(\s*(.*?)\s*\)\s*\Z", re.S)
_DSL_INT_RE = re.compile(r"-?[0-9]+\Z")
_DSL_FLOAT_RE = re.compile(r"-?(?:[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)\Z")


def parse_generator_expr(text: str, expected: SemType) -> GeneratorExpr:
    """Parse one DSL expression such as "int(-20,20)"; its kind must match
    the declared type of the argument it generates values for."""
    if not isinstance(text, str):
        raise DslError(f"generator expression must be text, got {type(text).__name__}")
    m = _DSL_RE.match(text)
    if m is None:
        raise DslError(f"bad generator expression {text!r}")
    tag, params_text = m.group(1), m.group(2)
    kind = SemType(tag)
    if kind is not expected:
        raise DslError(
            f"generator {text.strip()!r} produces {tag}, argument is {expected.value}"
        )
    params = [p.strip() for p in params_text.split(",")] if params_text else []

    if kind is SemType.BOOL:
        if params:
            raise DslError(f"bool() takes no parameters, got {text!r}")
        return BoolCoin()

    if len(params) != 2:
        raise DslError(f"{tag}(...) takes two parameters, got {text!r}")
    a, b = params
    if kind is SemType.INT:
        if not (_DSL_INT_RE.match(a) and _DSL_INT_RE.match(b)):
            raise DslError(f"int bounds must be integers, got {text!r}")
        lo, hi = int(a), int(b)
        if lo > hi:
            raise DslError(f"empty range in {text.strip()!r} (lo > hi)")
        return IntRange(lo, hi)
    if kind is SemType.FLOAT:
        if not (_DSL_FLOAT_RE.match(a) and _DSL_FLOAT_RE.match(b)):
            raise DslError(f"float bounds must be numbers, got {text!r}")
        lo_f, hi_f = float(a), float(b)
        if lo_f > hi_f:
            raise DslError(f"empty range in {text.strip()!r} (lo > hi)")
        return FloatRange(lo_f, hi_f)
    # str(minlen,maxlen)
    if not (a.isdigit() and b.isdigit()):
        raise DslError(f"str lengths must be non-negative integers, got {text!r}")
    min_len, max_len = int(a), int(b)
    if min_len > max_len:
        raise DslError(f"empty length range in {text.strip()!r}")
    return StrGen(min_len, max_len)


# ---------------------------------------------------------------------------
# Argument tuples


def split_tuple(text: str) -> list[str]:
    """Split "(10, 5)" into raw element texts, honouring quoted strings."""
    s = text.strip()
    if not s.startswith("("):
        raise TupleError(f"{text!r} does not start with '('")
    if not s.endswith(")"):
        raise TupleError(f"{text!r} does not end with ')'")
    inner = s[1:-1]
    if inner.strip() == "":
        return []
    elements: list[str] = []
    current: list[str] = []
    in_string = False
    i = 0
    while i < len(inner):
        ch = inner[i]
        if in_string:
            current.append(ch)
            if ch == "\\" and i + 1 < len(inner):
                current.append(inner[i + 1])
                i += 1
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
            current.append(ch)
        elif ch == ",":
            elements.append("".join(current))
            current = []
        else:
            current.append(ch)
        i += 1
    if in_string:
        raise TupleError(f"unterminated string in {text!r}")
    elements.append("".join(current))
    return elements


def parse_args_tuple(text: str, types: list[SemType]) -> list[Value]:
    """Parse a parenthesized comma-separated tuple positionally against
    the declared argument types."""
    elements = split_tuple(text)
    if len(elements) != len(types):
        raise TupleError(
            f"{text.strip()!r} has {len(elements)} elements, expected {len(types)}"
        )
    parsed: list[Value] = []
    for i, (element, sem_type) in enumerate(zip(elements, types)):
        try:
            parsed.append(parse_value(element.strip(), sem_type))
        except ValueFormatError as exc:
            raise TupleError(f"element {i} of {text.strip()!r}: {exc}") from None
    return parsed


# ---------------------------------------------------------------------------
# Schema


@dataclass(frozen=True)
class ArgSpec:
    name: str
    type: SemType


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    args: tuple[ArgSpec, ...]
    return_type: SemType

    @property
    def arg_types(self) -> list[SemType]:
        return [a.type for a in self.args]

    @property
    def arg_names(self) -> list[str]:
        return [a.name for a in self.args]


@dataclass(frozen=True)
class PredefinedTest:
    data: str
    feedback: tuple[tuple[str, str], ...] = ()

    def feedback_map(self) -> dict[str, str]:
        return dict(self.feedback)


@dataclass(frozen=True)
class RandomSpec:
    n: int
    args: tuple[GeneratorExpr, ...]
    seed: int | None = None


@dataclass(frozen=True)
class TestPlan:
    predefined: tuple[PredefinedTest, ...] = ()
    random: RandomSpec | None = None

    @property
    def total_tests(self) -> int:
        return len(self.predefined) + (self.random.n if self.random else 0)


@dataclass(frozen=True)
class Solution:
    fields: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.fields)


@dataclass(frozen=True)
class TaskConfig:
    spec: FunctionSpec
    test: TestPlan
    solution: Solution


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(path, f"missing required key {key!r}")
    return doc[key]


def _reject_unknown(doc: dict, allowed: set[str], path: str) -> None:
    for key in doc:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}" if path else key, "unknown key")


def _require_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected text, got {type(value).__name__}")
    return value


def _require_int(value, path: str) -> int:
    if type(value) is not int:
        raise SchemaError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _parse_spec(doc, path: str = "spec") -> FunctionSpec:
    if not isinstance(doc, dict):
        raise SchemaError(path, "must be an object")
    _reject_unknown(doc, {"name", "args", "return"}, path)
    name = _require_str(_require(doc, "name", path), f"{path}.name")
    if not IDENTIFIER_RE.match(name) or keyword.iskeyword(name):
        raise SchemaError(f"{path}.name", f"{name!r} is not a usable identifier")
    raw_args = _require(doc, "args", path)
    if not isinstance(raw_args, list):
        raise SchemaError(f"{path}.args", "must be a list")
    args: list[ArgSpec] = []
    for i, raw in enumerate(raw_args):
        arg_path = f"{path}.args[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError(arg_path, "must be an object")
        _reject_unknown(raw, {"name", "type"}, arg_path)
        arg_name = _require_str(_require(raw, "name", arg_path), f"{arg_path}.name")
        if not IDENTIFIER_RE.match(arg_name) or keyword.iskeyword(arg_name):
            raise SchemaError(f"{arg_path}.name", f"{arg_name!r} is not a usable identifier")
        tag = _require_str(_require(raw, "type", arg_path), f"{arg_path}.type")
        try:
            sem_type = SemType.from_tag(tag)
        except ValueFormatError as exc:
            raise SchemaError(f"{arg_path}.type", str(exc)) from None
        args.append(ArgSpec(arg_name, sem_type))
    names = [a.name for a in args]
    if len(set(names)) != len(names):
        raise SchemaError(f"{path}.args", f"duplicate argument names in {names}")
    tag = _require_str(_require(doc, "return", path), f"{path}.return")
    try:
        return_type = SemType.from_tag(tag)
    except ValueFormatError as exc:
        raise SchemaError(f"{path}.return", str(exc)) from None
    return FunctionSpec(name, tuple(args), return_type)


def _parse_predefined(doc, spec: FunctionSpec, path: str) -> PredefinedTest:
    if not isinstance(doc, dict):
        raise SchemaError(path, "must be an object")
    _reject_unknown(doc, {"data", "feedback"}, path)
    data = _require_str(_require(doc, "data", path), f"{path}.data")
    try:
        values = parse_args_tuple(data, spec.arg_types)
    except TupleError as exc:
        raise SchemaError(f"{path}.data", str(exc)) from None
    for value in values:
        # NUL cannot travel through the CSV test-data file.
        if value.type is SemType.STR and "\x00" in value.data:
            raise SchemaError(f"{path}.data", "NUL character in test data")
    feedback: list[tuple[str, str]] = []
    if "feedback" in doc:
        raw_fb = doc["feedback"]
        if not isinstance(raw_fb, dict):
            raise SchemaError(f"{path}.feedback", "must be an object")
        for key, message in raw_fb.items():
            key_path = f"{path}.feedback.{key}"
            if key != WILDCARD_KEY:
                try:
                    parse_value(key, spec.return_type)
                except ValueFormatError:
                    raise SchemaError(
                        key_path,
                        f"key must be {WILDCARD_KEY!r} or parse as "
                        f"{spec.return_type.value}",
                    ) from None
            feedback.append((key, _require_str(message, key_path)))
    return PredefinedTest(data, tuple(feedback))


def _parse_random(doc, spec: FunctionSpec, path: str = "test.random") -> RandomSpec:
    if not isinstance(doc, dict):
        raise SchemaError(path, "must be an object")
    _reject_unknown(doc, {"n", "args", "seed"}, path)
    n = _require_int(_require(doc, "n", path), f"{path}.n")
    if n < 0:
        raise SchemaError(f"{path}.n", "must be non-negative")
    raw_args = _require(doc, "args", path)
    if not isinstance(raw_args, list):
        raise SchemaError(f"{path}.args", "must be a list")
    if len(raw_args) != len(spec.args):
        raise SchemaError(
            f"{path}.args",
            f"{len(raw_args)} generators for {len(spec.args)} arguments",
        )
    exprs: list[GeneratorExpr] = []
    for i, raw in enumerate(raw_args):
        expr_path = f"{path}.args[{i}]"
        text = _require_str(raw, expr_path)
        try:
            exprs.append(parse_generator_expr(text, spec.args[i].type))
        except DslError as exc:
            raise SchemaError(expr_path, str(exc)) from None
    seed = None
    if "seed" in doc:
        seed = _require_int(doc["seed"], f"{path}.seed")
        if not 0 <= seed < 2**64:
            raise SchemaError(f"{path}.seed", "must fit in 64 bits")
    return RandomSpec(n, tuple(exprs), seed)


def validate_config(doc) -> TaskConfig:
    """Validate an already-decoded configuration document."""
    if not isinstance(doc, dict):
        raise SchemaError("", "configuration must be a JSON object")
    _reject_unknown(doc, {"spec", "test", "solution"}, "")
    spec = _parse_spec(_require(doc, "spec", ""))

    raw_test = _require(doc, "test", "")
    if not isinstance(raw_test, dict):
        raise SchemaError("test", "must be an object")
    _reject_unknown(raw_test, {"predefined", "random"}, "test")
    predefined: list[PredefinedTest] = []
    if "predefined" in raw_test:
        raw_pre = raw_test["predefined"]
        if not isinstance(raw_pre, list):
            raise SchemaError("test.predefined", "must be a list")
        for i, raw in enumerate(raw_pre):
            predefined.append(_parse_predefined(raw, spec, f"test.predefined[{i}]"))
    random_spec = None
    if "random" in raw_test:
        random_spec = _parse_random(raw_test["random"], spec)
    plan = TestPlan(tuple(predefined), random_spec)
    if plan.total_tests < 1:
        raise SchemaError("test", "empty test plan: no predefined tests and no random tests")

    raw_solution = _require(doc, "solution", "")
    if not isinstance(raw_solution, dict):
        raise SchemaError("solution", "must be an object")
    if SOLUTION_FIELD not in raw_solution:
        raise SchemaError("solution", f"missing field {SOLUTION_FIELD!r}")
    fields: list[tuple[str, str]] = []
    for name, fragment in raw_solution.items():
        if name != SOLUTION_FIELD:
            raise SchemaError(f"solution.{name}", "unknown solution field")
        fragment = _require_str(fragment, f"solution.{name}")
        if fragment.strip() == "":
            raise SchemaError(f"solution.{name}", "solution fragment is empty")
        fields.append((name, fragment))
    solution = Solution(tuple(fields))

    return TaskConfig(spec, plan, solution)


def parse_task_config(raw: str) -> TaskConfig:
    """Parse and validate a configuration from its JSON text."""
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not well-formed JSON: {exc}") from None
    return validate_config(doc)


def config_to_document(config: TaskConfig) -> dict:
    """Canonical document for a validated config (digests, round trips)."""
    doc: dict = {
        "spec": {
            "name": config.spec.name,
            "args": [{"name": a.name, "type": a.type.value} for a in config.spec.args],
            "return": config.spec.return_type.value,
        },
        "test": {},
        "solution": dict(config.solution.fields),
    }
    if config.test.predefined:
        doc["test"]["predefined"] = [
            {"data": p.data, **({"feedback": dict(p.feedback)} if p.feedback else {})}
            for p in config.test.predefined
        ]
    if config.test.random is not None:
        rand: dict = {
            "n": config.test.random.n,
            "args": [g.dsl_text() for g in config.test.random.args],
        }
        if config.test.random.seed is not None:
            rand["seed"] = config.test.random.seed
        doc["test"]["random"] = rand
    return doc
