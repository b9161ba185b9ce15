"""Block-sparse reward recovery for contextual decision problems.

When only a few of many actions carry reward signal, greedy block
selection over logged interactions identifies those actions, refits their
parameters, and certifies the result.  The package bundles the estimator,
exact-recovery diagnostics, an exhaustive oracle for desk-scale audits,
information-theoretic impossibility baselines, and a seeded Monte Carlo
harness with CSV/JSON output.
"""

from .bomp import BompResult, RankDeficientBlockError, StoppingRule, block_scores, refit_ls, run_bomp
from .decision import DecisionModel, ParamError, param_error, plugin_action, suboptimality_gap
from .diagnostics import (
    DiagnosticsReport,
    block_incoherence,
    check_thm1_events,
    gram,
    min_eigen,
    noise_correlations,
    realized_alpha,
    sample_size_threshold,
)
from .envgen import (
    Instance,
    InstanceSpec,
    SamplingPolicy,
    coverage_counts,
    min_coverage,
    sample_dataset,
    sample_instance,
)
from .experiments import (
    SweepGrid,
    TrialConfig,
    TrialResult,
    coverage_schedule,
    run_trial,
    sweep,
    write_results,
)
from .lower_bounds import (
    BestArmInstance,
    TwoPointInstance,
    bh_error_lower_bound,
    fano_error_lower_bound,
    kl_gaussian_shift,
    pinsker_tv_bound,
    run_best_arm_trials,
    run_coverage_trials,
    support_packing,
    two_point_coverage_kl,
)
from .model import (
    BlockDesign,
    Dataset,
    ParamMatrix,
    Sample,
    SupportSet,
    build_block_design,
    feature_map,
    predict_reward,
)
from .oracle import OracleResult, exhaustive_support_search, topk_by_initial_score
from .seeding import mix_seed, rng_for

__version__ = "0.1.0"

__all__ = [
    "BestArmInstance",
    "BlockDesign",
    "BompResult",
    "Dataset",
    "DecisionModel",
    "DiagnosticsReport",
    "Instance",
    "InstanceSpec",
    "OracleResult",
    "ParamError",
    "ParamMatrix",
    "RankDeficientBlockError",
    "Sample",
    "SamplingPolicy",
    "StoppingRule",
    "SupportSet",
    "SweepGrid",
    "TrialConfig",
    "TrialResult",
    "TwoPointInstance",
    "bh_error_lower_bound",
    "block_incoherence",
    "block_scores",
    "build_block_design",
    "check_thm1_events",
    "coverage_counts",
    "coverage_schedule",
    "exhaustive_support_search",
    "fano_error_lower_bound",
    "feature_map",
    "gram",
    "kl_gaussian_shift",
    "min_coverage",
    "min_eigen",
    "mix_seed",
    "noise_correlations",
    "param_error",
    "pinsker_tv_bound",
    "plugin_action",
    "predict_reward",
    "realized_alpha",
    "refit_ls",
    "rng_for",
    "run_best_arm_trials",
    "run_bomp",
    "run_coverage_trials",
    "run_trial",
    "sample_dataset",
    "sample_instance",
    "sample_size_threshold",
    "suboptimality_gap",
    "support_packing",
    "sweep",
    "topk_by_initial_score",
    "two_point_coverage_kl",
    "write_results",
]
