"""Quantitative uniform-distribution testing: exact star discrepancy and bounds.

The star discrepancy D*_N = sup_t |#{n<=N : x_n < t}/N - t| is the
quantitative surrogate for uniform distribution mod 1; it is computed exactly
from the order statistics in O(N log N).  An Erdos-Turan style bound built
from Weyl sums provides an independent cross-check from the other direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DomainError, Orbit, RangeError, ValidationError
from .weyl import WeylSeries

__all__ = [
    "DiscrepancyProfile",
    "star_discrepancy",
    "ud_profile",
    "erdos_turan_bound",
]

# Verdict calibration: finite-sample evidence only, never a proof.
CONSISTENT_THRESHOLD = 0.02
INCONSISTENT_FLOOR = 0.10
VERDICT_MIN_N = 10**5

ERDOS_TURAN_CONSTANT = 3.0


@dataclass(frozen=True)
class DiscrepancyProfile:
    checkpoints: tuple[int, ...]
    dstar: tuple[float, ...]
    verdict_hint: str  # consistent-with-ud | inconsistent | inconclusive

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/discrepancy_profile/v1",
            "checkpoints": list(self.checkpoints),
            "dstar": list(self.dstar),
            "verdict_hint": self.verdict_hint,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["N,dstar"]
        for n, d in zip(self.checkpoints, self.dstar):
            lines.append(f"{n},{d!r}")
        return "\n".join(lines) + "\n"


def star_discrepancy(points) -> float:
    """Exact D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N) over sorted points."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    n = x.size
    if n == 0:
        raise RangeError("star discrepancy of an empty point set is undefined")
    if x[0] < 0.0 or x[-1] >= 1.0:
        raise DomainError("points must lie in [0, 1)")
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(i / n - x), np.max(x - (i - 1.0) / n)))


def ud_profile(
    orb: Orbit,
    checkpoints: Sequence[int],
    consistent_threshold: float = CONSISTENT_THRESHOLD,
    inconsistent_floor: float = INCONSISTENT_FLOOR,
    min_n: int = VERDICT_MIN_N,
) -> DiscrepancyProfile:
    """Star discrepancy of the first N positions at each checkpoint, plus a verdict.

    The verdict looks at the checkpoints large enough to be informative (N >=
    min_n, falling back to the last checkpoint when none qualify): bounded
    below by the floor everywhere there -> "inconsistent"; decayed below the
    threshold by the end -> "consistent-with-ud"; anything else is
    "inconclusive".
    """
    cps = [int(n) for n in checkpoints]
    if not cps or any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1:
        raise ValidationError("checkpoints must be strictly increasing positive integers")
    if cps[-1] > len(orb):
        raise RangeError(f"checkpoint {cps[-1]} exceeds orbit length {len(orb)}")
    dstar = tuple(star_discrepancy(orb.positions[:n]) for n in cps)
    tail = [d for n, d in zip(cps, dstar) if n >= min_n] or [dstar[-1]]
    if all(d >= inconsistent_floor for d in tail):
        verdict = "inconsistent"
    elif dstar[-1] <= consistent_threshold and dstar[-1] <= dstar[0]:
        verdict = "consistent-with-ud"
    else:
        verdict = "inconclusive"
    return DiscrepancyProfile(checkpoints=tuple(cps), dstar=dstar, verdict_hint=verdict)


def erdos_turan_bound(
    series: Sequence[WeylSeries],
    N: int,
    constant: float = ERDOS_TURAN_CONSTANT,
) -> float:
    """C * (1/K + sum_{h=1}^{K} |W_{N,h}| / (h N)) from series for h = 1..K.

    With C = 3 this dominates the star discrepancy of the first N positions;
    it is used as a cross-module consistency check, not to optimize constants.
    """
    if not series:
        raise ValidationError("need Weyl series for h = 1..K")
    total = 0.0
    for expected_h, ws in enumerate(series, start=1):
        if ws.h != expected_h:
            raise ValidationError(
                f"series must cover h = 1..K in order; got h={ws.h} at slot {expected_h}"
            )
        try:
            idx = ws.checkpoints.index(N)
        except ValueError:
            raise ValidationError(f"series for h={ws.h} has no checkpoint N={N}") from None
        total += abs(ws.sums[idx]) / (expected_h * N)
    return constant * (1.0 / len(series) + total)
