"""Random step-choice orbits on the unit circle.

A library and CLI for generating orbits driven by words over a finite
alphabet of step values, measuring their equidistribution (exact star
discrepancy, Weyl exponential sums with moment and tail estimators), and
constructing certified non-equidistributed orbits together with the
Hausdorff-dimension arithmetic of the underlying Cantor schemes.
"""

from .core import (
    GOLDEN,
    NAMED_STEPS,
    SQRT2M1,
    SQRT3M1,
    BudgetError,
    CirclewalkError,
    DomainError,
    EnumerationBudgetError,
    InfeasibleAvoidanceError,
    Interval,
    InvalidAlphabetError,
    InvalidFrequencyError,
    InvalidWordError,
    Orbit,
    RangeError,
    StepSet,
    ValidationError,
    Word,
    fixed_point_positions,
    hit_count,
    metric_distance,
    orbit,
    sample_word,
)
from .equidist import DiscrepancyProfile, erdos_turan_bound, star_discrepancy, ud_profile
from .exceptional import (
    AvoidancePolicy,
    CantorSchedule,
    CertificateRecord,
    ExceptionalCertificate,
    avoid_extension,
    cantor_word,
    dimension_estimate,
    gdelta_word,
    least_hit_interval,
    separation_ratios,
    verify_certificate,
)
from .weyl import (
    CharAverage,
    MomentReport,
    TailReport,
    WeylSeries,
    char_average,
    completion_identity_error,
    completion_identity_max_error,
    completion_sum,
    exhaustive_sq_moment,
    expected_sq_modulus,
    mc_second_moment,
    mc_tail_probability,
    phase_factors,
    weyl_sum,
)

__version__ = "0.1.0"
