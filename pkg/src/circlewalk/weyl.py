"""Exponential sums along orbits and their moment/tail estimators.

W_{N,h} = sum_{n<=N} e(h S_n) with e(x) = exp(2*pi*i*x).  The module carries
three independent routes to the same quantities so each can check the others:
a closed-form second moment, a brute-force enumeration over all words of a
given length, and seeded Monte Carlo sampling.  Completion sums U_{N,h}
(additively twisted sums weighted by 1/(|j|+1)) are evaluated with one FFT,
with a direct quadratic reference path behind a flag.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    EnumerationBudgetError,
    InvalidFrequencyError,
    Orbit,
    RangeError,
    StepSet,
    ValidationError,
    orbit,
    sample_word,
)

__all__ = [
    "WeylSeries",
    "MomentReport",
    "TailReport",
    "CharAverage",
    "phase_factors",
    "weyl_sum",
    "char_average",
    "expected_sq_modulus",
    "exhaustive_sq_moment",
    "completion_sum",
    "completion_identity_error",
    "completion_identity_max_error",
    "mc_second_moment",
    "mc_tail_probability",
]

_TWO_PI = 2.0 * math.pi
_UNIMODULAR_TOL = 1e-9


def _check_h(h: int) -> None:
    if h == 0:
        raise InvalidFrequencyError("frequency h must be a non-zero integer")


def phase_factors(orb: Orbit, h: int) -> np.ndarray:
    """e(h S_n) for every orbit position.

    The phase h*S_n is reduced mod 1 from the already-reduced S_n, so large h
    does not amplify accumulated drift.
    """
    _check_h(h)
    ph = np.mod(h * orb.positions, 1.0)
    return np.exp(1j * _TWO_PI * ph)


@dataclass(frozen=True)
class WeylSeries:
    """Partial sums W_{N,h} at increasing checkpoints."""

    h: int
    checkpoints: tuple[int, ...]
    sums: tuple[complex, ...]
    normalized: tuple[float, ...]

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/weyl_series/v1",
            "h": self.h,
            "checkpoints": list(self.checkpoints),
            "sums": [[z.real, z.imag] for z in self.sums],
            "normalized": list(self.normalized),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["N,re,im,normalized"]
        for n, z, r in zip(self.checkpoints, self.sums, self.normalized):
            lines.append(f"{n},{z.real!r},{z.imag!r},{r!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MomentReport:
    """Monte Carlo estimate of E|W_{N,h}|^2 next to the closed form."""

    N: int
    h: int
    trials: int
    sample_mean: float
    closed_form: float
    standard_error: float
    theta: complex

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/moment_report/v1",
            "N": self.N,
            "h": self.h,
            "trials": self.trials,
            "sample_mean": self.sample_mean,
            "closed_form": self.closed_form,
            "standard_error": self.standard_error,
            "theta": [self.theta.real, self.theta.imag],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        header = "N,h,trials,sample_mean,closed_form,standard_error,theta_re,theta_im"
        row = (
            f"{self.N},{self.h},{self.trials},{self.sample_mean!r},{self.closed_form!r},"
            f"{self.standard_error!r},{self.theta.real!r},{self.theta.imag!r}"
        )
        return header + "\n" + row + "\n"


@dataclass(frozen=True)
class TailReport:
    """Estimated probability that the completion sum crosses a threshold."""

    N: int
    h: int
    epsilon: float
    threshold: float
    trials: int
    exceed_count: int
    probability: float
    ci_low: float
    ci_high: float

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/tail_report/v1",
            "N": self.N,
            "h": self.h,
            "epsilon": self.epsilon,
            "threshold": self.threshold,
            "trials": self.trials,
            "exceed_count": self.exceed_count,
            "probability": self.probability,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class CharAverage:
    """One-step character average (1/ell) * sum_k e(h alpha_k)."""

    value: complex
    unimodular: bool  # all e(h alpha_k) coincide; correlations do not decay

    @property
    def case(self) -> str:
        return "unimodular" if self.unimodular else "contracting"


def weyl_sum(orb: Orbit, h: int, checkpoints: Sequence[int]) -> WeylSeries:
    """Evaluate W_{N,h} at each checkpoint in one pass with compensated summation."""
    _check_h(h)
    cps = [int(n) for n in checkpoints]
    if not cps:
        raise ValidationError("need at least one checkpoint")
    if any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1:
        raise ValidationError("checkpoints must be strictly increasing positive integers")
    if cps[-1] > len(orb):
        raise RangeError(f"checkpoint {cps[-1]} exceeds orbit length {len(orb)}")
    factors = phase_factors(orb, h)
    sums: list[complex] = []
    total = 0j
    comp = 0j
    prev = 0
    for n in cps:
        seg = complex(np.sum(factors[prev:n]))
        y = seg - comp
        t = total + y
        comp = (t - total) - y
        total = t
        sums.append(total)
        prev = n
    normalized = tuple(abs(z) / n for z, n in zip(sums, cps))
    return WeylSeries(h=h, checkpoints=tuple(cps), sums=tuple(sums), normalized=normalized)


def char_average(steps: StepSet, h: int) -> CharAverage:
    """(1/ell) sum_k e(h alpha_k), with its case classification.

    The average is unimodular exactly when all e(h alpha_k) agree; that is the
    degenerate case where one-step correlations never decay.
    """
    _check_h(h)
    units = [cmath.exp(1j * _TWO_PI * math.fmod(h * a, 1.0)) for a in steps.values]
    value = sum(units) / steps.ell
    spread = max(abs(u - units[0]) for u in units)
    return CharAverage(value=value, unimodular=spread < _UNIMODULAR_TOL)


def expected_sq_modulus(steps: StepSet, h: int, N: int) -> float:
    """Exact E|W_{N,h}|^2 = N + 2 Re sum_{k=1}^{N-1} (N-k) theta^k.

    Uses the geometric closed form when 1 - theta is safely away from zero,
    otherwise the O(N) direct sum (the closed form divides by 1 - theta).
    """
    _check_h(h)
    if N < 1:
        raise RangeError("N must be >= 1")
    theta = char_average(steps, h).value
    if N == 1:
        return 1.0
    if abs(1.0 - theta) > 1e-9:
        # sum_{k=1}^{N-1} (N-k) x^k = N*x*(1-x^(N-1))/(1-x) - x*(1-N*x^(N-1)+(N-1)*x^N)/(1-x)^2
        x = theta
        xn1 = x ** (N - 1)
        one = 1.0 - x
        s = N * x * (1.0 - xn1) / one - x * (1.0 - N * xn1 + (N - 1) * xn1 * x) / (one * one)
    else:
        k = np.arange(1, N)
        s = complex(np.sum((N - k) * np.power(theta, k)))
    return float(N + 2.0 * s.real)


def exhaustive_sq_moment(steps: StepSet, h: int, n: int, budget: int = 1 << 22) -> float:
    """Brute-force mean of |W_{n,h}|^2 over all ell**n words.

    Independent of the closed form: level-by-level enumeration of the word
    tree with prefix reuse, O(ell**n) work and memory.
    """
    _check_h(h)
    if n < 1:
        raise RangeError("n must be >= 1")
    if steps.ell**n > budget:
        raise EnumerationBudgetError(
            f"enumeration of {steps.ell}**{n} words exceeds the budget of {budget}"
        )
    alphas = np.asarray(steps.values, dtype=np.float64)
    positions = np.zeros(1, dtype=np.float64)
    sums = np.zeros(1, dtype=np.complex128)
    for _ in range(n):
        positions = (positions[:, None] + alphas[None, :]).ravel()
        positions -= np.floor(positions)
        sums = np.repeat(sums, steps.ell) + np.exp(
            1j * _TWO_PI * np.mod(h * positions, 1.0)
        )
    return float(np.mean(np.abs(sums) ** 2))


def _twisted_sums(factors: np.ndarray) -> np.ndarray:
    """T_j = sum_{n=1}^N e(h S_n) e(j n / N) for j = 0..N-1, via one FFT."""
    n = factors.size
    j = np.arange(n)
    return np.exp(1j * _TWO_PI * j / n) * np.fft.ifft(factors) * n


def _twisted_sums_direct(factors: np.ndarray) -> np.ndarray:
    """Quadratic reference path for the twisted sums."""
    n = factors.size
    out = np.empty(n, dtype=np.complex128)
    idx = np.arange(1, n + 1)
    for j in range(n):
        out[j] = np.sum(factors * np.exp(1j * _TWO_PI * j * idx / n))
    return out


def completion_sum(orb: Orbit, h: int, N: int, method: str = "fft") -> float:
    """U_{N,h} = sum_{j=-N}^{N} |T_j| / (|j|+1), using T_{j+N} = T_j."""
    _check_h(h)
    if not 1 <= N <= len(orb):
        raise RangeError(f"N={N} out of range for orbit of length {len(orb)}")
    if method not in ("fft", "direct"):
        raise ValidationError(f"unknown completion method {method!r}")
    factors = phase_factors(orb, h)[:N]
    t = _twisted_sums(factors) if method == "fft" else _twisted_sums_direct(factors)
    mags = np.abs(t)
    j = np.arange(N)
    weights = 1.0 / (j + 1.0) + 1.0 / (N - j + 1.0)
    # j = 0 appears once at weight 1; j = +-N both alias T_0 at weight 1/(N+1).
    weights[0] = 1.0 + 2.0 / (N + 1.0)
    return float(np.sum(mags * weights))


def _checked_window(orb: Orbit, h: int, N: int) -> np.ndarray:
    _check_h(h)
    if not 1 <= N <= len(orb):
        raise RangeError(f"N={N} out of range for orbit of length {len(orb)}")
    return phase_factors(orb, h)[:N]


def completion_identity_error(orb: Orbit, h: int, M: int, N: int) -> float:
    """|W_{M,h} - (1/N) sum_{j=1}^{N} (sum_{k<=M} e(-jk/N)) T_j|.

    This is an exact orthogonality identity; the return value measures only
    floating round-off.
    """
    factors = _checked_window(orb, h, N)
    if not 1 <= M <= N:
        raise RangeError(f"need 1 <= M={M} <= N={N}")
    t = _twisted_sums(factors)
    j = np.arange(1, N + 1)
    ej = np.exp(-1j * _TWO_PI * j / N)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = ej * (1.0 - ej**M) / (1.0 - ej)
    c[-1] = float(M)  # j = N: every term e(-Nk/N) = 1
    t_wrapped = np.concatenate([t[1:], t[:1]])  # T_j for j = 1..N, T_N = T_0
    recon = np.sum(c * t_wrapped) / N
    direct = complex(np.sum(factors[:M]))
    return float(abs(direct - recon))


def completion_identity_max_error(orb: Orbit, h: int, N: int) -> float:
    """Max of completion_identity_error over every M = 1..N (vectorized)."""
    factors = _checked_window(orb, h, N)
    t = _twisted_sums(factors)
    j = np.arange(1, N + 1)
    k = np.arange(1, N + 1)
    kernel = np.exp(-1j * _TWO_PI * np.outer(j, k) / N)
    coeffs = np.cumsum(kernel, axis=1)  # coeffs[j-1, M-1] = sum_{k<=M} e(-jk/N)
    t_wrapped = np.concatenate([t[1:], t[:1]])
    recon = (t_wrapped @ coeffs) / N
    direct = np.cumsum(factors)
    return float(np.max(np.abs(direct - recon)))


def _trial_values(
    steps: StepSet,
    h: int,
    N: int,
    trials: int,
    seed: int,
    per_trial,
    threads: int | None = None,
) -> np.ndarray:
    """Evaluate a per-word statistic for `trials` counter-derived sub-streams.

    Results land in a preallocated array indexed by trial, so the reduction
    order (and therefore the reported value) is independent of thread count.
    """
    values = np.empty(trials, dtype=np.float64)

    def run(t: int) -> None:
        word = sample_word(seed, N, steps.ell, stream=t)
        values[t] = per_trial(orbit(word, steps))

    if threads is not None and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(trials)))
    else:
        for t in range(trials):
            run(t)
    return values


def mc_second_moment(
    steps: StepSet,
    h: int,
    N: int,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> MomentReport:
    """Sample |W_{N,h}|^2 over independent words and compare to the closed form."""
    _check_h(h)
    if trials < 2:
        raise ValidationError("need at least 2 trials")

    def sq_modulus(orb: Orbit) -> float:
        return abs(complex(np.sum(phase_factors(orb, h)))) ** 2

    values = _trial_values(steps, h, N, trials, seed, sq_modulus, threads)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(trials))
    return MomentReport(
        N=N,
        h=h,
        trials=trials,
        sample_mean=mean,
        closed_form=expected_sq_modulus(steps, h, N),
        standard_error=se,
        theta=char_average(steps, h).value,
    )


def _wilson_interval(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def mc_tail_probability(
    steps: StepSet,
    h: int,
    N: int,
    epsilon: float,
    trials: int,
    seed: int,
    threshold: float | None = None,
    threads: int | None = None,
) -> TailReport:
    """Estimate P(U_{N,h} >= N^(1/2) (log N)^(3/2+epsilon)).

    Natural logarithm throughout.  ``threshold`` overrides the default for
    calibration runs; the reported 95% interval is the Wilson score interval.
    """
    _check_h(h)
    if N < 3:
        raise RangeError("N must be >= 3 so that log N > 1")
    if trials < 1:
        raise ValidationError("need at least 1 trial")
    if epsilon <= 0 and threshold is None:
        raise ValidationError("epsilon must be positive")
    thr = threshold if threshold is not None else math.sqrt(N) * math.log(N) ** (1.5 + epsilon)

    def completion(orb: Orbit) -> float:
        return completion_sum(orb, h, N)

    values = _trial_values(steps, h, N, trials, seed, completion, threads)
    exceed = int(np.count_nonzero(values >= thr))
    lo, hi = _wilson_interval(exceed, trials)
    return TailReport(
        N=N,
        h=h,
        epsilon=float(epsilon),
        threshold=float(thr),
        trials=trials,
        exceed_count=exceed,
        probability=exceed / trials,
        ci_low=lo,
        ci_high=hi,
    )
