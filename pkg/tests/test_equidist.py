from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circlewalk import (
    SQRT2M1,
    SQRT3M1,
    DomainError,
    Interval,
    RangeError,
    StepSet,
    ValidationError,
    erdos_turan_bound,
    hit_count,
    orbit,
    sample_word,
    star_discrepancy,
    ud_profile,
    weyl_sum,
)

IRR = StepSet([SQRT2M1, SQRT3M1])


# ---------------------------------------------------------------- D* exact


def test_star_discrepancy_hand_examples():
    assert star_discrepancy([0.5]) == 0.5
    assert star_discrepancy([0.0]) == 1.0
    # evenly shifted grid {0.1, 0.3, 0.5, 0.7, 0.9}: D* = 0.1
    assert star_discrepancy([0.1, 0.3, 0.5, 0.7, 0.9]) == pytest.approx(0.1)
    # perfect left-endpoints grid {0, 1/4, 1/2, 3/4}: D* = 1/4
    assert star_discrepancy([0.0, 0.25, 0.5, 0.75]) == pytest.approx(0.25)
    assert star_discrepancy([0.9, 0.95]) == pytest.approx(0.9)


def test_star_discrepancy_validation():
    with pytest.raises(RangeError):
        star_discrepancy([])
    with pytest.raises(DomainError):
        star_discrepancy([0.5, 1.0])
    with pytest.raises(DomainError):
        star_discrepancy([-0.1])


def _grid_oracle(points, grid=100_000):
    """Brute-force sup over t in a uniform grid; within 1/grid of the truth."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    t = np.arange(1, grid + 1) / grid
    counts = np.searchsorted(x, t, side="left")
    return float(np.max(np.abs(counts / x.size - t)))


def test_star_discrepancy_matches_grid_oracle():
    for seed, n in [(0, 10), (1, 97), (2, 1000)]:
        pts = orbit(sample_word(seed, n, 2), IRR).positions
        exact = star_discrepancy(pts)
        approx = _grid_oracle(pts)
        assert abs(exact - approx) <= 1.0 / 100_000 + 1e-12


@given(st.lists(st.floats(0.0, 0.999999, allow_nan=False), min_size=1, max_size=200))
@settings(max_examples=100, deadline=None)
def test_star_discrepancy_bounds_and_permutation_invariance(xs):
    d = star_discrepancy(xs)
    n = len(xs)
    assert 1.0 / (2.0 * n) - 1e-15 <= d <= 1.0
    assert star_discrepancy(list(reversed(xs))) == d


def test_discrepancy_controls_interval_counts():
    # |h(x, [0,t), N)/N - t| <= D*_N for every t
    o = orbit(sample_word(5, 2000, 2), IRR)
    d = star_discrepancy(o.positions)
    for t in np.linspace(0.05, 0.95, 19):
        freq = hit_count(o, Interval(0.0, float(t)), 2000) / 2000
        assert abs(freq - t) <= d + 1e-12


# ---------------------------------------------------------------- profiles


def test_ud_profile_irrational_converges():
    o = orbit(sample_word(1, 10**5, 2), IRR)
    prof = ud_profile(o, [10, 100, 1000, 10**4, 10**5])
    assert prof.verdict_hint == "consistent-with-ud"
    assert prof.dstar[-1] < 0.02
    assert len(prof.checkpoints) == 5


def test_ud_profile_rational_orbit_is_inconsistent():
    # steps {1/3, 2/3}: orbit lives on {0, 1/3, 2/3}, D* >= 1/6 forever
    steps = StepSet([Fraction(1, 3), Fraction(2, 3)])
    o = orbit(sample_word(0, 10**5, 2), steps)
    prof = ud_profile(o, [10**4, 10**5])
    assert all(d >= 1.0 / 6.0 - 1e-12 for d in prof.dstar)
    # the 1/6 floor sits above the default 0.10 cutoff
    assert prof.verdict_hint == "inconsistent"


def test_ud_profile_small_n_is_inconclusive_or_consistent():
    o = orbit(sample_word(1, 50, 2), IRR)
    prof = ud_profile(o, [10, 50])
    assert prof.verdict_hint in ("inconclusive", "consistent-with-ud", "inconsistent")
    with pytest.raises(ValidationError):
        ud_profile(o, [])
    with pytest.raises(RangeError):
        ud_profile(o, [10, 60])


def test_ud_profile_serialization():
    o = orbit(sample_word(1, 100, 2), IRR)
    prof = ud_profile(o, [10, 100])
    assert '"circlewalk/discrepancy_profile/v1"' in prof.to_json()
    assert prof.to_csv().splitlines()[0] == "N,dstar"


# ---------------------------------------------------------------- Erdos-Turan


def test_erdos_turan_trivial_arithmetic():
    # Fabricated series with |W_N| = 0 for all h: bound = C / K exactly.
    from circlewalk import WeylSeries

    series = [
        WeylSeries(h=h, checkpoints=(100,), sums=(0j,), normalized=(0.0,))
        for h in range(1, 101)
    ]
    assert erdos_turan_bound(series, 100) == pytest.approx(3.0 / 100.0)
    # |W| = N at one frequency adds C/h
    series[0] = WeylSeries(h=1, checkpoints=(100,), sums=(100 + 0j,), normalized=(1.0,))
    assert erdos_turan_bound(series, 100) == pytest.approx(3.0 / 100.0 + 3.0)


def test_erdos_turan_dominates_discrepancy():
    word = sample_word(2, 20000, 2)
    o = orbit(word, IRR)
    n = 20000
    series = [weyl_sum(o, h, [n]) for h in range(1, 33)]
    bound = erdos_turan_bound(series, n)
    assert star_discrepancy(o.positions) <= bound


def test_erdos_turan_validation():
    from circlewalk import WeylSeries

    with pytest.raises(ValidationError):
        erdos_turan_bound([], 10)
    wrong_order = [WeylSeries(h=2, checkpoints=(10,), sums=(0j,), normalized=(0.0,))]
    with pytest.raises(ValidationError):
        erdos_turan_bound(wrong_order, 10)
    missing_cp = [WeylSeries(h=1, checkpoints=(5,), sums=(0j,), normalized=(0.0,))]
    with pytest.raises(ValidationError):
        erdos_turan_bound(missing_cp, 10)
