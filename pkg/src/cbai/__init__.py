"""Best-arm identification under Huber reward contamination."""

from .bandit import (
    ArmDistribution,
    BanditInstance,
    ContaminationModel,
    RewardTape,
    SeedSpec,
    sample_reward,
    true_gaps,
)
from .confidence import (
    RadiusParams,
    beta_gap_radius,
    exploration_floor,
    gamma_se_radius,
    lower_bound_report,
    problem_complexity,
    upper_bound_report,
)
from .datasets import ingest_pkis2, ingest_ratings
from .estimators import ArmStatistics, empirical_median, trimmed_mean
from .exceptions import AssumptionError, CBAIError, ConfigError, InfeasibleError, IngestionError, StateError
from .harness import ExperimentConfig, SweepTable, TrialResult, run_experiment, run_trial, sweep
from .policies import (
    PolicyState,
    gcbai_overlap,
    gcbai_select_arm,
    gcbai_should_stop,
    median_se_step,
    random_policy_select,
    secbai_step,
)

__version__ = "0.1.0"
