"""bntrace: how much does a released Bayesian network leak about its pool?

Learn discrete networks from categorical data, mount the optimal
likelihood-ratio tracing attack against a release, and compare the attack's
measured power with the closed-form bound driven by model complexity.
"""

from .bn import (
    BayesianNetwork,
    NetworkStructure,
    complexity,
    load_model,
    log_joint,
    log_joint_batch,
    sample,
    save_model,
    topological_order,
)
from .attack import (
    AttackDecision,
    LrDecomposition,
    RocCurve,
    Verdict,
    calibrate_threshold,
    decide,
    empirical_roc,
    fit_population_model,
    lr_statistic,
    lr_statistics,
    mann_whitney_auc,
)
from .dataset import Dataset, SplitSpec, biased_sample, load_csv, split, write_csv
from .errors import CycleError, ValidationError
from .experiment import (
    ComparisonTable,
    ExperimentConfig,
    ExperimentReport,
    compare_table,
    parse_config_file,
    random_structure,
    run_experiment,
)
from .learn import (
    PriorSpec,
    StructureSearchConfig,
    entropy_correlation,
    learn_parameters,
    learn_structure,
    min_support_filter,
    parent_score,
    synthesize,
)
from .theory import (
    BoundCurve,
    TheoryProfile,
    bound_auc,
    bound_curve,
    bound_power,
    gdp_delta,
    gdp_power_cap,
    lr_moments,
    naive_bayes_variance,
    normal_cdf,
    normal_quantile,
)

__version__ = "0.1.0"

__all__ = [
    "AttackDecision",
    "BayesianNetwork",
    "BoundCurve",
    "ComparisonTable",
    "CycleError",
    "Dataset",
    "ExperimentConfig",
    "ExperimentReport",
    "LrDecomposition",
    "NetworkStructure",
    "PriorSpec",
    "RocCurve",
    "SplitSpec",
    "StructureSearchConfig",
    "TheoryProfile",
    "ValidationError",
    "Verdict",
    "biased_sample",
    "bound_auc",
    "bound_curve",
    "bound_power",
    "calibrate_threshold",
    "compare_table",
    "complexity",
    "decide",
    "empirical_roc",
    "entropy_correlation",
    "fit_population_model",
    "gdp_delta",
    "gdp_power_cap",
    "learn_parameters",
    "learn_structure",
    "load_csv",
    "load_model",
    "log_joint",
    "log_joint_batch",
    "lr_moments",
    "lr_statistic",
    "lr_statistics",
    "mann_whitney_auc",
    "min_support_filter",
    "naive_bayes_variance",
    "normal_cdf",
    "normal_quantile",
    "parent_score",
    "parse_config_file",
    "random_structure",
    "run_experiment",
    "sample",
    "save_model",
    "split",
    "synthesize",
    "topological_order",
    "write_csv",
]
