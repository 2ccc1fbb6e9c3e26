"""Distance-correlation dependence testing for univariate samples.

Fast O(n log n) biased and bias-corrected distance correlation, partial
distance correlation, permutation and asymptotic independence tests, the
Fisher-transform Pearson tests, and Monte-Carlo harnesses for rejection-rate
and variable-filtering studies.
"""

from .dcor import (DCorEstimate, DistanceAggregates, dcor_bias_corrected,
                   dcor_biased_sq, dcov_biased_sq, dcov_unbiased,
                   fast_distance_aggregates)
from .distributions import (DistributionSpec, X_LABELS, Y_LABELS, Z_ROSTER,
                            FILTER_FAMILY_ORDER, as_spec, default_distribution,
                            label_for, sample)
from .exceptions import (ConfigError, DataError, DcorkitError,
                         DimensionMismatchError, ParameterError,
                         SampleSizeError, SingularityError)
from .inference import (TestResult, asymptotic_pvalue, dcor_test_asymptotic,
                        dcor_test_permutation, pdcor_test_asymptotic,
                        pdcor_test_permutation)
from .pdcor import PartialDCorEstimate, pdcor
from .pearson import (PearsonEstimate, fisher_transform, partial_pearson,
                      pearson_corr, pearson_test)
from .rng import RngStream, derive_seed
from .simulation import (FILTER_KEYS, METHODS, FilterReport, RateReport,
                         ScenarioSpec, gen_case4, gen_case5, gen_case6,
                         run_case, run_filtering, scenarios_for_case)

__version__ = "0.1.0"

__all__ = [
    "DCorEstimate", "DistanceAggregates", "dcor_bias_corrected",
    "dcor_biased_sq", "dcov_biased_sq", "dcov_unbiased",
    "fast_distance_aggregates",
    "DistributionSpec", "X_LABELS", "Y_LABELS", "Z_ROSTER",
    "FILTER_FAMILY_ORDER", "as_spec", "default_distribution", "label_for",
    "sample",
    "ConfigError", "DataError", "DcorkitError", "DimensionMismatchError",
    "ParameterError", "SampleSizeError", "SingularityError",
    "TestResult", "asymptotic_pvalue", "dcor_test_asymptotic",
    "dcor_test_permutation", "pdcor_test_asymptotic", "pdcor_test_permutation",
    "PartialDCorEstimate", "pdcor",
    "PearsonEstimate", "fisher_transform", "partial_pearson", "pearson_corr",
    "pearson_test",
    "RngStream", "derive_seed",
    "FILTER_KEYS", "METHODS", "FilterReport", "RateReport", "ScenarioSpec",
    "gen_case4", "gen_case5", "gen_case6", "run_case", "run_filtering",
    "scenarios_for_case",
    "__version__",
]
