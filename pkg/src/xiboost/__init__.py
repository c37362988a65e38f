"""Rank correlation with many right nearest neighbors, and the independence
tests built on it: permutation calibration, a normal-limit test, local-power
boundaries, and a reproducible Monte Carlo study harness."""

from .coefficients import (
    CoefficientValue,
    Method,
    PopulationXi,
    chatterjee_xi,
    extremal_bounds,
    extremal_bounds_exact,
    gaussian_population_xi,
    hoeffding_d,
    monotone_extremal_values_exact,
    pearson_r,
    symmetric_nn_sum,
    xi_nm,
    xi_nm_exact,
    xi_nm_from_ranks,
    xi_nm_reflected,
    xi_pm,
)
from .errors import (
    ConfigError,
    DegenerateError,
    GammaRangeError,
    MRangeError,
    NonFiniteError,
    ParseError,
    RegimeError,
    RhoRangeError,
    SizeError,
    StudyError,
    TieError,
    XiBoostError,
)
from .inference import (
    NullMoments,
    PermutationTestConfig,
    TestResult,
    asymptotic_test,
    null_moments_enumerate,
    null_variance_asymptotic,
    pearson_test,
    permutation_test,
    permutation_test_fast_path_equivalence,
    replicate_statistic_from_permutation,
)
from .power import beta_of_gamma, regime_ok, sample_rotation, zeta
from .ranks import (
    Sample,
    XOrder,
    compute_ranks,
    derive_rng,
    derive_seed,
    random_rank_permutation,
    reflect_ranks,
    right_neighbor,
    sorted_y_ranks,
    x_order,
)
from .simulation import (
    PowerStudyConfig,
    StudyReport,
    consistency_study,
    null_calibration_study,
    power_study,
    timing_study,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientValue",
    "ConfigError",
    "DegenerateError",
    "GammaRangeError",
    "MRangeError",
    "Method",
    "NonFiniteError",
    "NullMoments",
    "ParseError",
    "PermutationTestConfig",
    "PopulationXi",
    "PowerStudyConfig",
    "RegimeError",
    "RhoRangeError",
    "Sample",
    "SizeError",
    "StudyError",
    "StudyReport",
    "TestResult",
    "TieError",
    "XOrder",
    "XiBoostError",
    "asymptotic_test",
    "beta_of_gamma",
    "chatterjee_xi",
    "compute_ranks",
    "consistency_study",
    "derive_rng",
    "derive_seed",
    "extremal_bounds",
    "extremal_bounds_exact",
    "gaussian_population_xi",
    "hoeffding_d",
    "monotone_extremal_values_exact",
    "null_calibration_study",
    "null_moments_enumerate",
    "null_variance_asymptotic",
    "pearson_r",
    "pearson_test",
    "permutation_test",
    "permutation_test_fast_path_equivalence",
    "power_study",
    "random_rank_permutation",
    "reflect_ranks",
    "regime_ok",
    "replicate_statistic_from_permutation",
    "right_neighbor",
    "sample_rotation",
    "sorted_y_ranks",
    "symmetric_nn_sum",
    "timing_study",
    "x_order",
    "xi_nm",
    "xi_nm_exact",
    "xi_nm_from_ranks",
    "xi_nm_reflected",
    "xi_pm",
    "zeta",
]
