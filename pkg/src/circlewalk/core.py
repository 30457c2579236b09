"""Symbolic words over a finite alphabet and the orbits they generate on the unit circle.

A word over {1, ..., ell} selects, at each step, one of ell fixed step values
in (0, 1); the orbit is the sequence of partial sums reduced modulo one.
Positions are computed in 64-bit fixed point (one unsigned integer per point,
scaled by 2**64), so reduction mod 1 is exact integer wrap-around and the only
error is the initial rounding of each step value, below 2**-65 per step.
A 128-bit fixed-point recomputation path exists as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "CirclewalkError",
    "ValidationError",
    "InvalidAlphabetError",
    "InvalidWordError",
    "InvalidFrequencyError",
    "RangeError",
    "DomainError",
    "BudgetError",
    "EnumerationBudgetError",
    "InfeasibleAvoidanceError",
    "StepSet",
    "Word",
    "Interval",
    "Orbit",
    "sample_word",
    "orbit",
    "metric_distance",
    "hit_count",
    "fixed_point_positions",
    "SQRT2M1",
    "SQRT3M1",
    "GOLDEN",
    "NAMED_STEPS",
]

_SCALE_BITS = 64
_SCALE = 1 << _SCALE_BITS
_MASK = _SCALE - 1

# Canonical irrational step values at full double precision.
SQRT2M1 = math.sqrt(2.0) - 1.0
SQRT3M1 = math.sqrt(3.0) - 1.0
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

NAMED_STEPS = {"sqrt2m1": SQRT2M1, "sqrt3m1": SQRT3M1, "golden": GOLDEN}


class CirclewalkError(Exception):
    """Base class for all library errors."""


class ValidationError(CirclewalkError, ValueError):
    """A precondition on arguments was violated."""


class InvalidAlphabetError(ValidationError):
    pass


class InvalidWordError(ValidationError):
    pass


class InvalidFrequencyError(ValidationError):
    pass


class RangeError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class BudgetError(CirclewalkError):
    """A computation exceeded its configured size budget."""


class EnumerationBudgetError(BudgetError):
    pass


class InfeasibleAvoidanceError(CirclewalkError):
    """No step symbol can avoid the forbidden interval (or the gap condition fails)."""


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(float(value))


def _fixed_round(value: Fraction, bits: int) -> int:
    """Nearest integer to value * 2**bits (ties away from zero are irrelevant here)."""
    num = value.numerator << bits
    den = value.denominator
    return (2 * num + den) // (2 * den)


class StepSet:
    """The step values alpha_1, ..., alpha_ell, each in the open unit interval.

    Values may be supplied as floats or as exact ``Fraction`` instances.  When
    every value is an exact rational the set is flagged
    ``degenerate_rational_pair`` (the orbit then visits finitely many points
    and can never equidistribute); floating inputs are never certified either
    way, irrationality is a caller assertion.
    """

    __slots__ = ("values", "exact", "ell", "degenerate_rational_pair", "fixed64", "_fixed64_int")

    def __init__(self, values: Sequence[float | Fraction]):
        vals = tuple(values)
        if len(vals) < 1:
            raise InvalidAlphabetError("need at least one step value")
        if len(vals) > 255:
            raise InvalidAlphabetError("alphabet size is limited to 255")
        rational = all(isinstance(v, (Fraction, int)) for v in vals)
        exact = tuple(_to_fraction(v) for v in vals)
        floats = tuple(float(v) for v in vals)
        for v in floats:
            if not (0.0 < v < 1.0):
                raise InvalidAlphabetError(f"step value {v} outside the open unit interval")
        self.values = floats
        self.exact = exact
        self.ell = len(vals)
        self.degenerate_rational_pair = rational
        self._fixed64_int = tuple(_fixed_round(e, _SCALE_BITS) for e in exact)
        self.fixed64 = np.array(self._fixed64_int, dtype=np.uint64)

    def fixed(self, bits: int) -> tuple[int, ...]:
        """Step values rounded to ``bits``-bit fixed point, as Python integers."""
        return tuple(_fixed_round(e, bits) for e in self.exact)

    def __repr__(self) -> str:
        return f"StepSet({list(self.values)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, StepSet) and self.exact == other.exact

    def __hash__(self) -> int:
        return hash(self.exact)


class Word:
    """A finite symbol sequence over {1, ..., ell}, stored as a uint8 array."""

    __slots__ = ("symbols",)

    def __init__(self, symbols: Iterable[int] | np.ndarray):
        arr = np.asarray(symbols, dtype=np.uint8)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size and arr.min() < 1:
            raise InvalidWordError("symbols must be >= 1")
        arr.flags.writeable = False
        self.symbols = arr

    @classmethod
    def empty(cls) -> "Word":
        return cls(np.empty(0, dtype=np.uint8))

    @classmethod
    def from_string(cls, text: str) -> "Word":
        """Parse the digit serialization ("1212...") used for alphabets of size <= 9."""
        if not all(c.isdigit() and c != "0" for c in text):
            raise InvalidWordError(f"cannot parse word string {text!r}")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    def to_string(self) -> str:
        if self.symbols.size and self.symbols.max() > 9:
            raise InvalidWordError("digit serialization requires alphabet size <= 9")
        return (self.symbols + ord("0")).tobytes().decode("ascii")

    def prefix(self, m: int) -> "Word":
        if not 0 <= m <= len(self):
            raise RangeError(f"prefix length {m} out of range")
        return Word(self.symbols[:m])

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __iter__(self) -> Iterator[int]:
        return iter(int(s) for s in self.symbols)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.symbols[i])
        return int(self.symbols[i])

    def __add__(self, other: "Word") -> "Word":
        return Word(np.concatenate([self.symbols, other.symbols]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Word)
            and len(self) == len(other)
            and bool(np.array_equal(self.symbols, other.symbols))
        )

    def __hash__(self) -> int:
        return hash(self.symbols.tobytes())

    def __repr__(self) -> str:
        if len(self) <= 24:
            return f"Word({self.to_string()!r})"
        return f"Word(<{len(self)} symbols>)"


@dataclass(frozen=True)
class Interval:
    """A subinterval of [0, 1], either half-open [a, b) or open (a, b)."""

    a: float
    b: float
    kind: str = "half-open"

    def __post_init__(self):
        if not (0.0 <= self.a < self.b <= 1.0):
            raise DomainError(f"invalid interval [{self.a}, {self.b}]")
        if self.kind not in ("half-open", "open"):
            raise DomainError(f"unknown interval kind {self.kind!r}")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x):
        x = np.asarray(x)
        if self.kind == "half-open":
            return (x >= self.a) & (x < self.b)
        return (x > self.a) & (x < self.b)

    def count(self, points) -> int:
        return int(np.count_nonzero(self.contains(points)))


class Orbit:
    """Partial sums S_1, ..., S_N of the chosen step values, reduced to [0, 1).

    ``positions`` holds float64 values in [0, 1); ``fixed`` holds the
    underlying 64-bit fixed-point accumulator (exact modulo-one arithmetic on
    the rounded step values).
    """

    __slots__ = ("word", "steps", "positions", "fixed")

    def __init__(self, word: Word, steps: StepSet, positions: np.ndarray, fixed: np.ndarray):
        self.word = word
        self.steps = steps
        self.positions = positions
        self.fixed = fixed

    def __len__(self) -> int:
        return int(self.positions.size)

    def __repr__(self) -> str:
        return f"Orbit(<{len(self)} positions>, steps={self.steps!r})"


def _bit_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """The documented generator: Philox4x64 keyed by (seed, stream).

    Philox is counter based, so distinct streams for one seed are independent
    by construction; Monte Carlo trial t uses stream t.
    """
    return np.random.Generator(np.random.Philox(key=[seed % _SCALE, stream % _SCALE]))


def sample_word(seed: int, length: int, ell: int, stream: int = 0) -> Word:
    """Draw ``length`` i.i.d. symbols uniform on {1, ..., ell}.

    Deterministic for fixed (seed, length, ell, stream).  One 64-bit draw is
    consumed per symbol, so a longer word with the same seed extends the
    shorter one.  The uniform map keeps the top 53 bits; the resulting bias is
    below ell * 2**-53 per symbol.
    """
    if ell < 1:
        raise InvalidAlphabetError("alphabet size must be >= 1")
    if ell > 255:
        raise InvalidAlphabetError("alphabet size is limited to 255")
    if length < 0:
        raise RangeError("length must be >= 0")
    if length == 0:
        return Word.empty()
    rng = _bit_generator(seed, stream)
    raw = rng.integers(0, _SCALE, size=length, dtype=np.uint64, endpoint=False)
    u = np.ldexp((raw >> np.uint64(11)).astype(np.float64), -53)
    sym = np.minimum((u * ell).astype(np.int64), ell - 1) + 1
    return Word(sym)


def orbit(word: Word, steps: StepSet) -> Orbit:
    """Generate the orbit of ``word``: S_n = frac(S_{n-1} + alpha_{x_n}), S_0 = 0."""
    sym = word.symbols
    if sym.size and int(sym.max()) > steps.ell:
        raise InvalidWordError(
            f"word uses symbol {int(sym.max())} but alphabet has {steps.ell} letters"
        )
    if sym.size == 0:
        empty = np.empty(0, dtype=np.float64)
        return Orbit(word, steps, empty, np.empty(0, dtype=np.uint64))
    increments = steps.fixed64[sym.astype(np.intp) - 1]
    fixed = np.cumsum(increments, dtype=np.uint64)  # wraps mod 2**64: exact reduction
    positions = np.ldexp((fixed >> np.uint64(11)).astype(np.float64), -53)
    return Orbit(word, steps, positions, fixed)


def fixed_point_positions(
    word: Word,
    steps: StepSet,
    bits: int = 128,
    indices: Sequence[int] | None = None,
) -> list[float]:
    """Independent oracle: recompute orbit positions in ``bits``-bit fixed point.

    Pure-Python big-integer accumulation; returns positions at the 1-based
    ``indices`` (default: all of them).
    """
    scale = 1 << bits
    mask = scale - 1
    vals = steps.fixed(bits)
    sym = word.symbols
    if sym.size and int(sym.max()) > steps.ell:
        raise InvalidWordError("symbol out of range for the step set")
    wanted = set(range(1, len(word) + 1)) if indices is None else set(indices)
    if wanted and (min(wanted) < 1 or max(wanted) > len(word)):
        raise RangeError("oracle index out of range")
    out: dict[int, float] = {}
    acc = 0
    for n, s in enumerate(sym.tolist(), start=1):
        acc = (acc + vals[s - 1]) & mask
        if n in wanted:
            out[n] = acc / scale
    return [out[n] for n in sorted(wanted)]


def metric_distance(x: Word, y: Word) -> float:
    """The 2**-k metric on words, k the longest common prefix length.

    Equal words are at distance 0 and words differing in the first symbol at
    distance 1.  Finite words are compared on their common length: if one is a
    proper prefix of the other (common length m), the distance is 2**-m, the
    diameter of the cylinder both of them pin down.
    """
    a, b = x.symbols, y.symbols
    if (len(a) == 0) != (len(b) == 0):
        raise ValidationError("metric_distance needs both words nonempty, or both empty")
    if len(a) == len(b) and np.array_equal(a, b):
        return 0.0
    m = min(len(a), len(b))
    eq = a[:m] == b[:m]
    if not bool(eq[0]):
        return 1.0
    k = m if bool(eq.all()) else int(np.argmin(eq))
    return 2.0 ** (-k)


def hit_count(orb: Orbit, interval: Interval, n: int) -> int:
    """h(x, I, n): how many of S_1, ..., S_n land in I.  S_0 is never counted."""
    if not 1 <= n <= len(orb):
        raise RangeError(f"n={n} exceeds orbit length {len(orb)}")
    return interval.count(orb.positions[:n])
