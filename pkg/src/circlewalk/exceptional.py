"""Constructions of orbits that provably fail to equidistribute.

Two builders emit finite word prefixes together with a certificate of their
defect:

* ``gdelta_word`` alternates a free prefix of length n with a greedily chosen
  block of length n^2 whose steps all avoid a fixed interval (0, tau); the
  hitting frequency of that interval at the block ends is at most
  n_k / (n_k + n_k^2).
* ``cantor_word`` follows a schedule (n_k): fill freely to length n_k, pick
  the least-visited of q equal cells by pigeonhole, then avoid it for
  floor(eps * n_k) steps, certifying frequency at most tau / (1 + eps/2).

The schedule arithmetic (n_k, n~_k = n_k + floor(eps n_k), log2 q_k, and the
resulting dimension estimates) is done in exact integer/rational arithmetic,
since super-geometric schedules like n_{k+1} = n_k^2 overflow 64 bits within a
few stages.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    BudgetError,
    InfeasibleAvoidanceError,
    Interval,
    Orbit,
    RangeError,
    StepSet,
    ValidationError,
    Word,
    hit_count,
    orbit,
    sample_word,
)

__all__ = [
    "AvoidancePolicy",
    "CantorSchedule",
    "CertificateRecord",
    "ExceptionalCertificate",
    "avoid_extension",
    "least_hit_interval",
    "gdelta_word",
    "cantor_word",
    "dimension_estimate",
    "separation_ratios",
    "verify_certificate",
]

_MASK = (1 << 64) - 1
_BOUNDARY_TOL = 1e-12
_LENGTH_BUDGET = 10**8


def _circle_distance(u: float, v: float) -> float:
    d = abs(u - v) % 1.0
    return min(d, 1.0 - d)


def feasibility_gap(steps: StepSet) -> float:
    """The largest forbidden-interval length the greedy avoider can tolerate.

    Minimum over all pairwise circle distances of step values and over each
    step's circle distance to 0.  Any interval strictly shorter than this gap
    can contain at most one of the candidate next positions, so some symbol
    always escapes it.
    """
    vals = steps.values
    gap = min(min(v, 1.0 - v) for v in vals)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            gap = min(gap, _circle_distance(vals[i], vals[j]))
    return gap


@dataclass(frozen=True)
class AvoidancePolicy:
    """A forbidden interval plus the greedy tie-break (lowest symbol index wins)."""

    target: Interval
    tie_break: str = "lowest-symbol"

    def check(self, steps: StepSet, tol: float = _BOUNDARY_TOL) -> None:
        if self.tie_break != "lowest-symbol":
            raise ValidationError(f"unknown tie-break rule {self.tie_break!r}")
        gap = feasibility_gap(steps)
        if self.target.length >= gap - tol:
            raise InfeasibleAvoidanceError(
                f"target length {self.target.length} is not below the feasibility gap {gap}"
            )


def _fixed_to_float(value: int) -> float:
    return (value >> 11) / 9007199254740992.0  # 2**53


def _avoid_steps(
    current: int,
    steps: StepSet,
    target: Interval,
    m: int,
    tol: float = _BOUNDARY_TOL,
) -> tuple[bytearray, int]:
    """Greedy core: extend from the 64-bit fixed-point position ``current``.

    A candidate is rejected whenever it lands within ``tol`` of the closed
    target, so a certificate recount with the exact interval can never
    disagree with the construction.
    """
    lo = target.a - tol
    hi = target.b + tol
    increments = [int(v) for v in steps.fixed64]
    symbols = bytearray()
    for _ in range(m):
        for k, inc in enumerate(increments):
            cand = (current + inc) & _MASK
            p = _fixed_to_float(cand)
            if not (lo < p < hi):
                symbols.append(k + 1)
                current = cand
                break
        else:
            raise InfeasibleAvoidanceError(
                f"every step from position {_fixed_to_float(current)} lands in the target"
            )
    return symbols, current


def avoid_extension(current: float, steps: StepSet, policy: AvoidancePolicy, m: int) -> Word:
    """A length-m word whose every visited point (from ``current``) misses the target."""
    if not 0.0 <= current < 1.0:
        raise ValidationError("current position must lie in [0, 1)")
    if m < 1:
        raise RangeError("extension length must be >= 1")
    policy.check(steps)
    start = round(current * (1 << 64)) & _MASK
    symbols, _ = _avoid_steps(start, steps, policy.target, m)
    return Word(np.frombuffer(bytes(symbols), dtype=np.uint8))


def _least_hit_cell(positions: np.ndarray, q: int) -> tuple[int, int]:
    """Lowest 1-based index of the least-visited of the q cells [(i-1)/q, i/q)."""
    cells = np.minimum((positions * q).astype(np.int64), q - 1)
    counts = np.bincount(cells, minlength=q)
    idx = int(np.argmin(counts))
    return idx + 1, int(counts[idx])


def least_hit_interval(orb: Orbit, q: int, n: int) -> int:
    """Pigeonhole selection: a cell with at most n/q hits among S_1..S_n."""
    if q < 2:
        raise ValidationError("need at least q = 2 cells")
    if not 1 <= n <= len(orb):
        raise RangeError(f"n={n} exceeds orbit length {len(orb)}")
    idx, _ = _least_hit_cell(orb.positions[:n], q)
    return idx


@dataclass(frozen=True)
class CertificateRecord:
    N: int
    interval: Interval
    hits: int
    frequency: float
    bound: float
    interval_index: int | None = None

    def as_dict(self) -> dict:
        payload = {
            "N": self.N,
            "interval": {"a": self.interval.a, "b": self.interval.b, "kind": self.interval.kind},
            "hits": self.hits,
            "frequency": self.frequency,
            "bound": self.bound,
        }
        if self.interval_index is not None:
            payload["interval_index"] = self.interval_index
        return payload


@dataclass(frozen=True)
class ExceptionalCertificate:
    """Per-checkpoint hitting-frequency records for a constructed word."""

    kind: str  # gdelta | cantor
    records: tuple[CertificateRecord, ...]
    selected_interval_index: int | None = None  # mode across stages (cantor only)

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/certificate/v1",
            "kind": self.kind,
            "records": [r.as_dict() for r in self.records],
        }
        if self.selected_interval_index is not None:
            payload["selected_interval_index"] = self.selected_interval_index
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def verify_certificate(word: Word, steps: StepSet, cert: ExceptionalCertificate) -> bool:
    """Re-simulate from scratch and recount every record exactly."""
    orb = orbit(word, steps)
    for rec in cert.records:
        hits = hit_count(orb, rec.interval, rec.N)
        if hits != rec.hits:
            return False
        if hits / rec.N > rec.bound + 1e-15:
            return False
    return True


def gdelta_word(
    steps: StepSet,
    tau: float,
    n1: int,
    stages: int,
    seed: int,
) -> tuple[Word, ExceptionalCertificate]:
    """Free prefix of length n_k, then an avoidance block of length n_k^2, iterated.

    n_{k+1} = n_k + n_k^2, so the certified hitting frequency of (0, tau) at
    checkpoint N_k = n_k + n_k^2 is at most n_k / (n_k + n_k^2), which tends
    to zero.  The free prefix is RNG-filled; every choice yields a member of
    the construction.
    """
    if n1 < 1:
        raise ValidationError("n1 must be >= 1")
    if stages < 0:
        raise RangeError("stages must be >= 0")
    target = Interval(0.0, tau, "open")
    policy = AvoidancePolicy(target)
    if stages > 0:
        policy.check(steps)
    # Pre-flight the total length against the budget.
    n, total = n1, n1
    for _ in range(stages):
        total += n * n
        if total > _LENGTH_BUDGET:
            raise BudgetError(f"construction length {total} exceeds budget {_LENGTH_BUDGET}")
        n = total
    free = sample_word(seed, n1, steps.ell)
    parts = [free.symbols]
    current = int(orbit(free, steps).fixed[-1]) if n1 > 0 else 0
    checkpoints: list[tuple[int, int]] = []  # (n_k, N_k)
    n = n1
    for _ in range(stages):
        block, current = _avoid_steps(current, steps, target, n * n)
        parts.append(np.frombuffer(bytes(block), dtype=np.uint8))
        checkpoints.append((n, n + n * n))
        n = n + n * n
    word = Word(np.concatenate(parts))
    orb = orbit(word, steps)
    records = []
    for nk, Nk in checkpoints:
        hits = hit_count(orb, target, Nk)
        records.append(
            CertificateRecord(
                N=Nk,
                interval=target,
                hits=hits,
                frequency=hits / Nk,
                bound=nk / Nk,
            )
        )
    return word, ExceptionalCertificate(kind="gdelta", records=tuple(records))


@dataclass(frozen=True)
class CantorSchedule:
    """Stage lengths n_k with n_{k+1} > 2 n_k, plus the avoidance fraction eps.

    Derived quantities (all exact): n~_k = n_k + floor(eps n_k), log2 q_1 =
    n_1 and log2 q_{k+1} = n_{k+1} - n~_k.  The telescoped partial sums give
    the dimension estimates.
    """

    eps: Fraction
    n: tuple[int, ...]

    def __post_init__(self):
        eps = Fraction(self.eps)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        if not (0 < eps <= 1):
            raise ValidationError(f"eps must lie in (0, 1], got {eps}")
        if not self.n or self.n[0] < 1:
            raise ValidationError("schedule needs at least one positive stage length")
        for a, b in zip(self.n, self.n[1:]):
            if b <= 2 * a:
                raise ValidationError(f"schedule must grow: need n_{{k+1}} > 2 n_k, got {a} -> {b}")

    def floor_eps(self, m: int) -> int:
        return (self.eps.numerator * m) // self.eps.denominator

    def __len__(self) -> int:
        return len(self.n)

    @property
    def n_tilde(self) -> tuple[int, ...]:
        return tuple(m + self.floor_eps(m) for m in self.n)

    @property
    def log2_q(self) -> tuple[int, ...]:
        nt = self.n_tilde
        out = [self.n[0]]
        for k in range(1, len(self.n)):
            out.append(self.n[k] - nt[k - 1])
        return tuple(out)

    @classmethod
    def squares(cls, eps, n1: int, count: int) -> "CantorSchedule":
        """The n_{k+1} = n_k^2 growth rule (requires n1 >= 3)."""
        n = [n1]
        for _ in range(count - 1):
            n.append(n[-1] * n[-1])
        return cls(Fraction(eps), tuple(n))

    @classmethod
    def geometric(cls, eps, base: int, count: int) -> "CantorSchedule":
        """The n_k = base^k rule; with eps = 1 this violates the corollary hypothesis."""
        return cls(Fraction(eps), tuple(base**k for k in range(1, count + 1)))


def dimension_estimate(schedule: CantorSchedule, k: int) -> float:
    """Partial dimension value (sum_{j<=k} log2 q_j) / n~_k, exact then floated."""
    if not 1 <= k <= len(schedule):
        raise RangeError(f"stage {k} out of range for schedule of length {len(schedule)}")
    consumed = sum(schedule.floor_eps(m) for m in schedule.n[: k - 1])
    value = Fraction(schedule.n[k - 1] - consumed, schedule.n_tilde[k - 1])
    return float(value)


def separation_ratios(schedule: CantorSchedule) -> list[float]:
    """(sum_{j<=k} log2 q_j) / log2 q_{k+1} for each k; must decay to 0 for the
    limit dimension to equal 1/(1+eps)."""
    if len(schedule) < 2:
        raise ValidationError("need a schedule of length >= 2")
    logs = schedule.log2_q
    ratios = []
    running = 0
    for k in range(len(logs) - 1):
        running += logs[k]
        ratios.append(float(Fraction(running, logs[k + 1])))
    return ratios


def cantor_word(
    steps: StepSet,
    schedule: CantorSchedule,
    q: int,
    seed: int,
    stages: int,
) -> tuple[Word, ExceptionalCertificate]:
    """Schedule-driven construction: free fill to n_k, pigeonhole a cell, avoid it.

    At each stage checkpoint n~_k the selected cell I (length tau = 1/q) has
    hitting frequency at most n_k tau / n~_k <= tau / (1 + eps/2), which keeps
    the orbit's empirical measure of I bounded away from |I| forever.
    """
    if q < 2:
        raise ValidationError("need q >= 2 cells")
    tau = 1.0 / q
    if tau >= feasibility_gap(steps) - _BOUNDARY_TOL:
        raise InfeasibleAvoidanceError(
            f"cell length 1/{q} is not below the feasibility gap {feasibility_gap(steps)}"
        )
    if schedule.eps * schedule.n[0] <= 10:
        raise ValidationError("need eps * n_1 > 10")
    if not 1 <= stages <= len(schedule):
        raise RangeError(f"stages={stages} out of range for schedule of length {len(schedule)}")
    n_tilde = schedule.n_tilde
    if n_tilde[stages - 1] > _LENGTH_BUDGET:
        raise BudgetError(f"construction length {n_tilde[stages - 1]} exceeds budget")
    bound = float(Fraction(1, q) / (1 + schedule.eps / 2))
    parts: list[np.ndarray] = []
    pos_parts: list[np.ndarray] = []
    current = 0
    length = 0

    def append_block(arr: np.ndarray) -> None:
        nonlocal current
        if arr.size == 0:
            return
        acc = np.cumsum(steps.fixed64[arr.astype(np.intp) - 1], dtype=np.uint64)
        acc += np.uint64(current)  # wraps mod 2**64
        parts.append(arr)
        pos_parts.append(np.ldexp((acc >> np.uint64(11)).astype(np.float64), -53))
        current = int(acc[-1])

    selected: list[int] = []
    stage_info: list[tuple[int, int, Interval]] = []  # (n_k, n~_k, cell)
    for k in range(stages):
        nk = schedule.n[k]
        if nk > length:
            free = sample_word(seed, nk - length, steps.ell, stream=k)
            append_block(free.symbols)
            length = nk
        prefix_positions = np.concatenate(pos_parts)
        idx, _ = _least_hit_cell(prefix_positions[:nk], q)
        cell = Interval((idx - 1) / q, idx / q, "half-open")
        selected.append(idx)
        block, _ = _avoid_steps(current, steps, cell, schedule.floor_eps(nk))
        append_block(np.frombuffer(bytes(block), dtype=np.uint8))
        length = n_tilde[k]
        stage_info.append((nk, n_tilde[k], cell))
    word = Word(np.concatenate(parts))
    orb = orbit(word, steps)
    records = []
    for (nk, ntk, cell), idx in zip(stage_info, selected):
        hits = hit_count(orb, cell, ntk)
        records.append(
            CertificateRecord(
                N=ntk,
                interval=cell,
                hits=hits,
                frequency=hits / ntk,
                bound=bound,
                interval_index=idx,
            )
        )
    mode_idx = min(Counter(selected).most_common(), key=lambda kv: (-kv[1], kv[0]))[0]
    return word, ExceptionalCertificate(
        kind="cantor", records=tuple(records), selected_interval_index=mode_idx
    )
