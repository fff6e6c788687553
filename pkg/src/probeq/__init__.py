"""Exact finite random variables on [0, 1), regret preferences and equivalence certificates."""

from .certificates import (
    Case,
    CertificateError,
    DistributionsDiffer,
    EquivalenceCertificate,
    VerificationReport,
    build_case1,
    build_case2,
    build_case3,
    certify_equivalence,
    classify_case,
    verify_certificate,
)
from .coupling import check_fosd_preference, comonotone_couple, skorokhod_represent
from .events import Event, Interval, carve, complement, intersect, measure, split_prefix, union
from .regret import (
    Difference,
    Expectation,
    ExpUtilityDifference,
    PowerUtilityDifference,
    RankDependent,
    TableRegret,
    Verdict,
    prefer,
    regret_lottery,
    validate_regret_function,
)
from .rv import (
    Distribution,
    Dominance,
    OutcomeBounds,
    SimpleRV,
    common_refinement,
    distribution,
    equal_in_distribution,
    fosd_compare,
    levy_distance,
    prob_diff_exceeds,
    quantile_rv,
)
from .scalar import SQRT2, Scalar, nu, scalar_compare

__version__ = "0.1.0"
