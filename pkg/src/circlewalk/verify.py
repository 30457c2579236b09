"""Named verification suites: the acceptance battery, oracle cross-checks, smoke.

Every criterion is reduced to one or more (measured, threshold, comparator)
triples, so a run prints one unambiguous pass/fail line per check and the
whole battery can be scripted.  The acceptance suite is the project's exit
criterion; the oracle suite re-derives key quantities along independent
routes; the smoke suite is a seconds-scale sanity pass.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    SQRT2M1,
    SQRT3M1,
    StepSet,
    ValidationError,
    Word,
    fixed_point_positions,
    hit_count,
    orbit,
    sample_word,
)
from .equidist import erdos_turan_bound, star_discrepancy
from .exceptional import (
    CantorSchedule,
    cantor_word,
    dimension_estimate,
    gdelta_word,
    separation_ratios,
    verify_certificate,
)
from .weyl import (
    completion_identity_max_error,
    completion_sum,
    exhaustive_sq_moment,
    expected_sq_modulus,
    mc_second_moment,
    weyl_sum,
)

__all__ = ["CriterionResult", "VerifyReport", "run_suite", "SUITES"]


@dataclass(frozen=True)
class CriterionResult:
    id: str
    description: str
    measured: float
    threshold: float
    comparator: str  # "<=" or ">="
    passed: bool
    elapsed_seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.id}: measured={self.measured:.6g} {self.comparator} "
            f"threshold={self.threshold:.6g} ({self.description}) [{self.elapsed_seconds:.2f}s]"
        )


@dataclass(frozen=True)
class VerifyReport:
    suite: str
    seed: int
    passed: bool
    criteria: tuple[CriterionResult, ...]

    def to_json(self) -> str:
        payload = {
            "schema": "circlewalk/verify_report/v1",
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "criteria": [
                {
                    "id": c.id,
                    "description": c.description,
                    "measured": c.measured,
                    "threshold": c.threshold,
                    "comparator": c.comparator,
                    "passed": c.passed,
                    "elapsed_seconds": c.elapsed_seconds,
                }
                for c in self.criteria
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _check(id_: str, desc: str, measured: float, threshold: float, cmp_: str) -> CriterionResult:
    measured = float(measured)
    ok = measured <= threshold if cmp_ == "<=" else measured >= threshold
    return CriterionResult(id_, desc, measured, float(threshold), cmp_, bool(ok))


def _irrational_steps() -> StepSet:
    return StepSet([SQRT2M1, SQRT3M1])


# --------------------------------------------------------------------------
# Acceptance criteria
# --------------------------------------------------------------------------


def _a01_second_moment_oracle(seed: int) -> list[CriterionResult]:
    worst = 0.0
    for steps in (_irrational_steps(), StepSet([0.25, 0.75]), StepSet([0.3, 0.7])):
        for h in (1, 2, 3):
            for n in (8, 10, 12):
                err = abs(exhaustive_sq_moment(steps, h, n) - expected_sq_modulus(steps, h, n))
                worst = max(worst, err)
    return [_check("A01", "exhaustive vs closed-form second moment", worst, 1e-9, "<=")]


def _a02_case2_collapse(seed: int) -> list[CriterionResult]:
    steps = StepSet([0.25, 0.75])
    h = 2
    unit = np.exp(1j * 2 * np.pi * np.mod(h * 0.25, 1.0))
    worst_eq = 0.0
    worst_val = 0.0
    partial = 0j
    for n in range(1, 1025):
        partial += unit**n
        expected = expected_sq_modulus(steps, h, n)
        worst_eq = max(worst_eq, abs(expected - abs(partial) ** 2))
        worst_val = max(worst_val, expected)
    cap = 4.0 / abs(unit - 1.0) ** 2 + 1.0
    return [
        _check("A02.equality", "degenerate case collapses to the one-step geometric sum", worst_eq, 1e-9, "<="),
        _check("A02.bounded", "degenerate-case expectation stays bounded", worst_val, cap, "<="),
    ]


def _a03_mc_moment(seed: int) -> list[CriterionResult]:
    rep = mc_second_moment(_irrational_steps(), 1, 2**14, 2000, seed=seed)
    dev = abs(rep.sample_mean - rep.closed_form) / rep.standard_error
    return [_check("A03", "Monte Carlo second moment within 4 standard errors", dev, 4.0, "<=")]


def _a04_sqrt_cancellation(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    levels = list(range(4, 21))
    cps = [2**lv for lv in levels]
    max_per_level = np.zeros(len(levels))
    for stream in range(100):
        word = sample_word(seed, 2**20, 2, stream=stream)
        series = weyl_sum(orbit(word, steps), 1, cps)
        for i, (n, z) in enumerate(zip(cps, series.sums)):
            ratio = abs(z) / (math.sqrt(n) * math.log(n) ** 2)
            max_per_level[i] = max(max_per_level[i], ratio)
    slope = float(np.polyfit(levels, max_per_level, 1)[0])
    return [
        _check("A04.constant", "normalized Weyl sums bounded by a constant", float(max_per_level.max()), 5.0, "<="),
        _check("A04.trend", "no increasing trend across dyadic levels", slope, 0.01, "<="),
    ]


def _a05_completion_identity(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    worst = 0.0
    for stream in range(20):
        word = sample_word(seed, 256, 2, stream=stream)
        orb = orbit(word, steps)
        for n in (16, 64, 256):
            worst = max(worst, completion_identity_max_error(orb, 1, n) / n)
    rel = 0.0
    word = sample_word(seed, 1024, 2, stream=1000)
    orb = orbit(word, steps)
    for n in (16, 64, 256, 1024):
        fft = completion_sum(orb, 1, n, method="fft")
        direct = completion_sum(orb, 1, n, method="direct")
        rel = max(rel, abs(fft - direct) / direct)
    return [
        _check("A05.identity", "completion orthogonality identity at round-off scale", worst, 1e-8, "<="),
        _check("A05.dft", "FFT completion sums match the quadratic path", rel, 1e-8, "<="),
    ]


def _a06_completion_tail_trend(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    sizes = [2**10, 2**12, 2**14]
    acc = {n: 0.0 for n in sizes}
    trials = 500
    for stream in range(trials):
        orb = orbit(sample_word(seed, sizes[-1], 2, stream=stream), steps)
        for n in sizes:
            u = completion_sum(orb, 1, n)
            acc[n] += u * u
    ratios = [acc[n] / trials / (n * math.log(n) ** 2) for n in sizes]
    growth = max(ratios[i + 1] / ratios[i] for i in range(len(sizes) - 1))
    return [_check("A06", "mean squared completion sum / (N log^2 N) non-increasing", growth, 1.2, "<=")]


def _a07_ud_evidence(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    values = []
    for stream in range(30):
        orb = orbit(sample_word(seed, 10**6, 2, stream=stream), steps)
        values.append(star_discrepancy(orb.positions))
    values = np.array(values)
    rational = StepSet([Fraction(1, 3), Fraction(2, 3)])
    orb = orbit(sample_word(seed, 1000, 2), rational)
    control = min(star_discrepancy(orb.positions[:n]) for n in range(3, 1001))
    return [
        _check("A07.all", "all random-orbit discrepancies small at N=10^6", float(values.max()), 1e-2, "<="),
        _check("A07.median", "median discrepancy at N=10^6", float(np.median(values)), 3e-3, "<="),
        _check("A07.control", "rational-degenerate control stays biased", control, 1.0 / 6.0, ">="),
    ]


def _a08_cantor_construction(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    schedule = CantorSchedule(Fraction(1), (16, 64, 256, 1024))
    word, cert = cantor_word(steps, schedule, q=10, seed=seed, stages=4)
    orb = orbit(word, steps)
    worst = 0.0
    for rec in cert.records:
        hits = hit_count(orb, rec.interval, rec.N)  # exact recount
        worst = max(worst, hits / rec.N)
    dstar = star_discrepancy(orb.positions)
    results = [
        _check("A08.frequency", "certified cell frequencies below tau/(1+eps/2)", worst, 1.0 / 15.0, "<="),
        _check("A08.discrepancy", "final-prefix star discrepancy above the derived floor", dstar, 0.03, ">="),
        _check("A08.recount", "certificate recount agrees", 1.0 if verify_certificate(word, steps, cert) else 0.0, 1.0, ">="),
    ]
    return results


def _a09_gdelta_construction(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    word, cert = gdelta_word(steps, tau=0.1, n1=4, stages=3, seed=seed)
    orb = orbit(word, steps)
    bounds = {20: 4 / 20, 420: 20 / 420, 176820: 420 / 176820}
    worst = 0.0
    for rec in cert.records:
        hits = hit_count(orb, rec.interval, rec.N)
        worst = max(worst, (hits / rec.N) / bounds[rec.N])
    return [
        _check("A09", "gdelta frequencies within the stage bounds (recounted)", worst, 1.0, "<="),
        _check("A09.recount", "certificate recount agrees", 1.0 if verify_certificate(word, steps, cert) else 0.0, 1.0, ">="),
    ]


def _a10_dimension_formula(seed: int) -> list[CriterionResult]:
    worst = 0.0
    worst_ratio_step = -math.inf
    for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
        schedule = CantorSchedule.squares(eps, 8, 7)
        worst = max(worst, abs(dimension_estimate(schedule, 6) - float(1 / (1 + eps))))
        ratios = separation_ratios(schedule)
        worst_ratio_step = max(
            worst_ratio_step, max(b - a for a, b in zip(ratios, ratios[1:]))
        )
    geometric = CantorSchedule.geometric(Fraction(1), 4, 12)
    geo_err = abs(dimension_estimate(geometric, 12) - 1.0 / 3.0)
    return [
        _check("A10.limit", "square-rule dimension estimates reach 1/(1+eps)", worst, 1e-3, "<="),
        _check("A10.ratios", "separation ratios strictly decreasing", worst_ratio_step, 0.0, "<="),
        _check("A10.control", "geometric schedule converges to 1/3, not 1/2", geo_err, 1e-3, "<="),
    ]


def _a11_cross_module(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    n = 2**16
    margin = math.inf
    for stream in range(50):
        orb = orbit(sample_word(seed, n, 2, stream=stream), steps)
        series = [weyl_sum(orb, h, [n]) for h in range(1, 33)]
        bound = erdos_turan_bound(series, n)
        margin = min(margin, bound - star_discrepancy(orb.positions))
    return [_check("A11", "Weyl-sum bound dominates the star discrepancy", margin, 0.0, ">=")]


# --------------------------------------------------------------------------
# Oracle cross-checks (cheap, independent-route recomputations)
# --------------------------------------------------------------------------


def _oracle_moment(seed: int) -> list[CriterionResult]:
    steps = _irrational_steps()
    err = abs(exhaustive_sq_moment(steps, 1, 12) - expected_sq_modulus(steps, 1, 12))
    return [_check("O.moment", "exhaustive vs closed-form moment at n=12", err, 1e-9, "<=")]


def _oracle_discrepancy_grid(seed: int) -> list[CriterionResult]:
    orb = orbit(sample_word(seed, 2000, 2), _irrational_steps())
    points = np.sort(orb.positions)
    grid = 10**5
    t = np.arange(1, grid + 1) / grid
    counts = np.searchsorted(points, t, side="left")
    brute = float(np.max(np.abs(counts / points.size - t)))
    exact = star_discrepancy(orb.positions)
    return [_check("O.dstar", "exact star discrepancy vs grid brute force", abs(exact - brute), 1.0 / grid, "<=")]


def _oracle_fixed_point(seed: int) -> list[CriterionResult]:
    word = sample_word(seed, 10**4, 2)
    steps = _irrational_steps()
    orb = orbit(word, steps)
    ref = fixed_point_positions(word, steps, bits=128, indices=[10**4])[0]
    return [_check("O.fixed", "float orbit vs 128-bit fixed-point oracle", abs(orb.positions[-1] - ref), 1e-9, "<=")]


def _oracle_completion(seed: int) -> list[CriterionResult]:
    orb = orbit(sample_word(seed, 256, 2), _irrational_steps())
    err = completion_identity_max_error(orb, 1, 256) / 256
    fft = completion_sum(orb, 1, 256)
    direct = completion_sum(orb, 1, 256, method="direct")
    return [
        _check("O.identity", "completion identity at N=256", err, 1e-8, "<="),
        _check("O.dft", "FFT vs direct completion sums at N=256", abs(fft - direct) / direct, 1e-8, "<="),
    ]


def _oracle_schedule(seed: int) -> list[CriterionResult]:
    schedule = CantorSchedule.squares(Fraction(1, 2), 32, 5)
    worst = 0
    total = 0
    for k, lg in enumerate(schedule.log2_q, start=1):
        total += lg
        expect = schedule.n[k - 1] - sum(schedule.floor_eps(m) for m in schedule.n[: k - 1])
        worst = max(worst, abs(total - expect))
    return [_check("O.telescope", "schedule telescoping identity (exact integers)", worst, 0.0, "<=")]


# --------------------------------------------------------------------------
# Smoke (seconds-scale sanity pass)
# --------------------------------------------------------------------------


def _smoke(seed: int) -> list[CriterionResult]:
    out = []
    orb = orbit(Word.from_string("1212"), StepSet([0.25, 0.5]))
    err = float(np.max(np.abs(orb.positions - np.array([0.25, 0.75, 0.0, 0.5]))))
    out.append(_check("S.orbit", "hand-checked orbit", err, 0.0, "<="))
    steps = _irrational_steps()
    err = abs(exhaustive_sq_moment(steps, 1, 8) - expected_sq_modulus(steps, 1, 8))
    out.append(_check("S.moment", "moment oracle at n=8", err, 1e-9, "<="))
    schedule = CantorSchedule(Fraction(1), (8, 64, 4096))
    err = abs(dimension_estimate(schedule, 3) - 4024 / 8192)
    out.append(_check("S.dimension", "closed-form dimension estimate", err, 0.0, "<="))
    word, cert = cantor_word(steps, CantorSchedule(Fraction(1), (16, 64)), q=10, seed=seed, stages=2)
    ok = verify_certificate(word, steps, cert)
    out.append(_check("S.cantor", "small construction recount", 1.0 if ok else 0.0, 1.0, ">="))
    rep = mc_second_moment(steps, 1, 256, 100, seed=seed)
    dev = abs(rep.sample_mean - rep.closed_form) / rep.standard_error
    out.append(_check("S.mc", "small Monte Carlo moment within 6 SE", dev, 6.0, "<="))
    return out


_ACCEPTANCE = [
    _a01_second_moment_oracle,
    _a02_case2_collapse,
    _a03_mc_moment,
    _a04_sqrt_cancellation,
    _a05_completion_identity,
    _a06_completion_tail_trend,
    _a07_ud_evidence,
    _a08_cantor_construction,
    _a09_gdelta_construction,
    _a10_dimension_formula,
    _a11_cross_module,
]

_ORACLES = [
    _oracle_moment,
    _oracle_discrepancy_grid,
    _oracle_fixed_point,
    _oracle_completion,
    _oracle_schedule,
]

SUITES = {
    "acceptance": _ACCEPTANCE,
    "oracles": _ORACLES,
    "smoke": [_smoke],
}


def run_suite(name: str, seed: int, echo=None) -> VerifyReport:
    """Run the named suite; returns the structured report.

    ``echo`` is called with each result line as it is produced (use ``print``
    from the CLI).
    """
    if name not in SUITES:
        raise ValidationError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results: list[CriterionResult] = []
    for fn in SUITES[name]:
        start = time.perf_counter()
        batch = fn(seed)
        elapsed = time.perf_counter() - start
        per = elapsed / max(len(batch), 1)
        for res in batch:
            res = CriterionResult(
                res.id, res.description, res.measured, res.threshold,
                res.comparator, res.passed, per,
            )
            results.append(res)
            if echo is not None:
                echo(res.line())
    return VerifyReport(
        suite=name,
        seed=seed,
        passed=all(r.passed for r in results),
        criteria=tuple(results),
    )
