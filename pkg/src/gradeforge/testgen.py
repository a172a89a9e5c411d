"""Concrete test suites: predefined rows first, then seeded random rows.

Determinism contract: a suite is a pure function of (plan, spec, seed).
The PRNG is splitmix64 with scaled-multiplication range reduction so the
byte-identical suite can be reproduced by any runtime, and the default
seed is an FNV-1a hash of task and submission ids so resubmissions are
reproducible while different learners face different random tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import (
    BoolCoin,
    FloatRange,
    FunctionSpec,
    GeneratorExpr,
    IntRange,
    StrGen,
    TestPlan,
    parse_args_tuple,
)
from .values import SemType, Value

_MASK64 = (1 << 64) - 1

SEED_SEPARATOR = "\x1f"

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def derive_seed(task_id: str, submission_id: str, override: int | None = None) -> int:
    """Seed for one grading run: an explicit override wins, otherwise a
    stable hash of task id and submission id."""
    if override is not None:
        return override & _MASK64
    joined = task_id + SEED_SEPARATOR + submission_id
    return fnv1a64(joined.encode("utf-8"))


class SplitMix64:
    """splitmix64 stream; trivially portable across languages."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        # Scaled multiplication: floor(u * n / 2^64), rejection-free.
        return (self.next_u64() * n) >> 64

    def int_between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def unit_float(self) -> float:
        # 53 top bits -> [0, 1)
        return (self.next_u64() >> 11) * (2.0**-53)


def sample(generator: GeneratorExpr, rng: SplitMix64) -> Value:
    """Draw one value; consumes the rng deterministically (one u64 for
    scalars, 1 + length u64s for strings)."""
    if isinstance(generator, IntRange):
        return Value(SemType.INT, rng.int_between(generator.lo, generator.hi))
    if isinstance(generator, FloatRange):
        span = generator.hi - generator.lo
        return Value(SemType.FLOAT, generator.lo + rng.unit_float() * span)
    if isinstance(generator, BoolCoin):
        return Value(SemType.BOOL, rng.next_u64() & 1 == 1)
    if isinstance(generator, StrGen):
        length = rng.int_between(generator.min_len, generator.max_len)
        chars = [chr(ord("a") + rng.below(26)) for _ in range(length)]
        return Value(SemType.STR, "".join(chars))
    raise TypeError(f"unknown generator {generator!r}")


@dataclass(frozen=True)
class TestCase:
    index: int
    args: tuple[Value, ...]
    predefined_index: int | None = None  # None marks a random case

    @property
    def is_predefined(self) -> bool:
        return self.predefined_index is not None


@dataclass(frozen=True)
class TestSuite:
    cases: tuple[TestCase, ...]
    seed: int

    def __len__(self) -> int:
        return len(self.cases)


def generate_suite(plan: TestPlan, spec: FunctionSpec, seed: int) -> TestSuite:
    """Materialize the suite: predefined rows in declaration order, then
    plan.random.n seeded rows. Duplicates are kept; they merely re-test."""
    cases: list[TestCase] = []
    for i, predefined in enumerate(plan.predefined):
        args = parse_args_tuple(predefined.data, spec.arg_types)
        cases.append(TestCase(len(cases), tuple(args), predefined_index=i))
    if plan.random is not None:
        rng = SplitMix64(seed)
        for _ in range(plan.random.n):
            args = tuple(sample(g, rng) for g in plan.random.args)
            cases.append(TestCase(len(cases), args))
    return TestSuite(tuple(cases), seed)


def _csv_field(value: Value, sole_field: bool) -> str:
    # Cells carry the raw payload for strings (the CSV layer owns the
    # quoting); other types use their canonical rendering.
    text = value.data if value.type is SemType.STR else value.render()
    if any(ch in text for ch in ',"\n\r') or (text == "" and sole_field):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_suite_csv(suite: TestSuite) -> str:
    """RFC-4180 text, no header, one row per case, "\\n" terminators."""
    rows = []
    for case in suite.cases:
        sole = len(case.args) == 1
        rows.append(",".join(_csv_field(v, sole) for v in case.args) + "\n")
    return "".join(rows)
