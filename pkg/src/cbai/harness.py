"""Monte Carlo experiment runner.

Every trial is a pure function of ``(config, master_seed, trial_index)``.
Trials can run in a process pool. Results are always merged in trial-index
order, so aggregates and CSV bytes do not depend on the worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from scipy import stats as _stats

from .bandit import ArmStream, BanditInstance, ContaminationModel, RewardTape
from .exceptions import ConfigError
from .policies import (
    GAP_POLICIES,
    POLICIES,
    RADIUS_MODES,
    PolicyState,
    gcbai_overlap,
    gcbai_select_arm,
    gcbai_should_stop,
    median_se_step,
    random_policy_select,
    recommendation,
    record_pull,
    secbai_step,
)

__all__ = [
    "ExperimentConfig",
    "TrialResult",
    "ExperimentSummary",
    "SweepRow",
    "SweepTable",
    "run_trial",
    "run_trials",
    "run_experiment",
    "sweep",
    "CSV_HEADER",
]

CSV_HEADER = ("param", "policy", "mean_tau", "std_tau", "stderr_tau", "error_rate", "n_trials", "truncated")


@dataclass(frozen=True)
class ExperimentConfig:
    instance: BanditInstance
    contamination: ContaminationModel = field(default_factory=ContaminationModel)
    policy: str = "gcbai"
    radius_mode: str = "theorem"
    delta: float = 0.1
    alpha: Optional[float] = None
    n_trials: int = 1000
    master_seed: int = 0
    max_rounds: int = 10_000_000
    beta_exp: float = 2.0
    c1_uncertainty: float = 1.0
    output: Optional[str] = None
    trace: Optional[str] = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ConfigError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.radius_mode not in RADIUS_MODES:
            raise ConfigError(f"radius_mode must be one of {RADIUS_MODES}, got {self.radius_mode!r}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.alpha is not None and not 0.0 <= self.alpha < 0.5:
            raise ConfigError(f"alpha must lie in [0, 0.5), got {self.alpha}")
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError(f"n_trials must be a positive integer, got {self.n_trials}")
        if int(self.max_rounds) != self.max_rounds or self.max_rounds < 1:
            raise ConfigError(f"max_rounds must be a positive integer, got {self.max_rounds}")
        if not self.beta_exp > 1:
            raise ConfigError(f"beta_exp must be > 1, got {self.beta_exp}")
        c = self.contamination
        if c.adversary == "uniform_random_mean" and c.per_arm_means is not None and len(c.per_arm_means) != self.instance.K:
            raise ConfigError(f"per_arm_means has {len(c.per_arm_means)} entries for {self.instance.K} arms")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    @property
    def effective_alpha(self) -> float:
        return self.contamination.assumed_epsilon / 2.0 if self.alpha is None else self.alpha

    def to_dict(self) -> dict:
        """Resolved settings that determine results (excludes output paths)."""
        inst = self.instance
        c = self.contamination
        return {
            "instance": {
                "arms": [{"kind": a.kind, "params": list(a.params)} for a in inst.arms],
                "sigma_proxy": inst.sigma_proxy,
                "uncertainty": None if inst.uncertainty is None else list(inst.uncertainty),
            },
            "contamination": {
                "epsilon": c.epsilon,
                "epsilon_assumed": c.epsilon_assumed,
                "adversary": c.adversary,
                "shift": c.shift,
                "half_width": c.half_width,
                "mean_range": None if c.mean_range is None else list(c.mean_range),
                "per_arm_means": None if c.per_arm_means is None else list(c.per_arm_means),
            },
            "policy": self.policy,
            "radius_mode": self.radius_mode,
            "delta": self.delta,
            "alpha": self.effective_alpha,
            "beta_exp": self.beta_exp,
            "n_trials": self.n_trials,
            "master_seed": self.master_seed,
            "max_rounds": self.max_rounds,
        }


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    tau: int
    recommended: int
    correct: bool
    truncated: bool
    wall_time: float
    pulls: tuple = ()
    eliminations: tuple = ()

    def to_json(self) -> str:
        return json.dumps(
            {
                "trial": self.trial_index,
                "tau": self.tau,
                "recommended": self.recommended,
                "correct": self.correct,
                "truncated": self.truncated,
            },
            sort_keys=False,
        )


def _make_state(config: ExperimentConfig) -> PolicyState:
    inst = config.instance
    estimator = "median" if config.policy == "median_se" else "trimmed"
    return PolicyState.create(
        inst.K,
        inst.sigma_proxy,
        config.contamination.assumed_epsilon,
        config.delta,
        alpha=config.alpha,
        beta_exp=config.beta_exp,
        radius_mode=config.radius_mode,
        estimator=estimator,
    )


def run_trial(config: ExperimentConfig, trial_index: int, trace: Optional[Callable[[dict], None]] = None) -> TrialResult:
    """Run one trial of ``config.policy`` to its stopping time or ``max_rounds``.

    ``trace``, if given, is called once per pull with a dict holding ``t``,
    ``arm``, ``reward``, ``contaminated`` and either ``overlap`` (gap
    policies) or ``active`` (elimination policies).
    """
    start = time.perf_counter()
    inst = config.instance
    tape = RewardTape(inst, config.contamination, config.master_seed, trial_index)
    state = _make_state(config)
    truncated = False

    if inst.K == 1:
        reward, flag = tape.reward(0, 1)
        record_pull(state, 0, reward)
        if trace is not None:
            trace({"t": 1, "arm": 0, "reward": reward, "contaminated": flag, "active": 1})
        state.stopped = True
    elif config.policy in GAP_POLICIES:
        truncated = _run_gap(config, state, tape, trial_index, trace)
    else:
        truncated = _run_elimination(config, state, tape, trace)

    rec = recommendation(state)
    return TrialResult(
        trial_index=trial_index,
        tau=state.t,
        recommended=rec,
        correct=rec == inst.best_arm(),
        truncated=truncated,
        wall_time=time.perf_counter() - start,
        pulls=tuple(state.counts),
        eliminations=tuple(state.eliminations),
    )


def _run_gap(config, state, tape, trial_index, trace) -> bool:
    cap = config.max_rounds
    randomised = config.policy == "random_gap"
    arm_stream = ArmStream(state.K, config.master_seed, trial_index) if randomised else None
    unpulled = state.K
    while True:
        if randomised:
            if unpulled == 0:
                gcbai_overlap(state)
            arm = random_policy_select(state, arm_stream)
        else:
            arm = gcbai_select_arm(state)
        if gcbai_should_stop(state):
            state.stopped = True
            return False
        if state.t >= cap:
            return True
        t = state.t + 1
        reward, flag = tape.reward(arm, t)
        if unpulled and state.stats[arm].count == 0:
            unpulled -= 1
        record_pull(state, arm, reward)
        if trace is not None:
            trace({"t": t, "arm": arm, "reward": reward, "contaminated": flag, "overlap": state.overlap})


def _run_elimination(config, state, tape, trace) -> bool:
    cap = config.max_rounds
    step = median_se_step if config.policy == "median_se" else secbai_step

    if trace is None:
        def reward_fn(arm, t):
            return tape.reward(arm, t)[0]
    else:
        def reward_fn(arm, t):
            reward, flag = tape.reward(arm, t)
            trace({"t": t, "arm": arm, "reward": reward, "contaminated": flag, "active": len(state.active)})
            return reward

    while len(state.active) > 1:
        if state.t + len(state.active) > cap:
            return True
        step(state, reward_fn)
    state.stopped = True
    return False


def _trial_worker(args):
    config, index = args
    return run_trial(config, index)


def run_trials(config: ExperimentConfig, workers: int = 1, indices: Optional[Sequence[int]] = None) -> List[TrialResult]:
    """Run trials ``indices`` (default ``range(n_trials)``), returned in index order."""
    idx = list(range(config.n_trials)) if indices is None else list(indices)
    # fail fast on setup errors before spawning workers
    if idx:
        RewardTape(config.instance, config.contamination, config.master_seed, idx[0])
        _make_state(config)
    if workers is None or workers <= 1 or len(idx) <= 1:
        results = [run_trial(config, i) for i in idx]
    else:
        chunk = max(1, len(idx) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_worker, [(config, i) for i in idx], chunksize=chunk))
    results.sort(key=lambda r: r.trial_index)
    return results


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregate over trials.

    ``stderr_defined`` is False when ``n_trials == 1``; std and stderr are
    then reported as 0.
    """

    n_trials: int
    mean_tau: float
    std_tau: float
    stderr_tau: float
    stderr_defined: bool
    error_rate: float
    ci_low: float
    ci_high: float
    truncated: int
    results: tuple = ()


def summarize(results: Sequence[TrialResult], confidence: float = 0.95) -> ExperimentSummary:
    """Welford aggregation in trial-index order plus an exact binomial CI."""
    ordered = sorted(results, key=lambda r: r.trial_index)
    n = 0
    mean = 0.0
    m2 = 0.0
    errors = 0
    truncated = 0
    for r in ordered:
        n += 1
        d = r.tau - mean
        mean += d / n
        m2 += d * (r.tau - mean)
        errors += not r.correct
        truncated += r.truncated
    if n == 0:
        raise ConfigError("cannot summarise zero trials")
    if n > 1:
        std = math.sqrt(m2 / (n - 1))
        stderr = std / math.sqrt(n)
    else:
        std = stderr = 0.0
    ci = _stats.binomtest(errors, n).proportion_ci(confidence_level=confidence, method="exact")
    return ExperimentSummary(
        n_trials=n,
        mean_tau=mean,
        std_tau=std,
        stderr_tau=stderr,
        stderr_defined=n > 1,
        error_rate=errors / n,
        ci_low=float(ci.low),
        ci_high=float(ci.high),
        truncated=truncated,
        results=tuple(ordered),
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentSummary:
    """Run ``config.n_trials`` trials and aggregate them."""
    return summarize(run_trials(config, workers))


@dataclass(frozen=True)
class SweepRow:
    param: float
    policy: str
    mean_tau: float
    std_tau: float
    stderr_tau: float
    error_rate: float
    n_trials: int
    truncated: int

    def cells(self) -> list:
        f = _fmt
        return [f(self.param), self.policy, f(self.mean_tau), f(self.std_tau), f(self.stderr_tau),
                f(self.error_rate), str(self.n_trials), str(self.truncated)]


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    rows: tuple
    config: Optional[ExperimentConfig] = None

    def to_csv(self, header_comment: bool = True) -> str:
        buf = io.StringIO()
        if header_comment and self.config is not None:
            meta = dict(self.config.to_dict(), swept=self.parameter)
            buf.write("# config: " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow(row.cells())
        return buf.getvalue()

    def write_csv(self, path: str, header_comment: bool = True) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv(header_comment))


def _row(value, config, summary) -> SweepRow:
    return SweepRow(float(value), config.policy, summary.mean_tau, summary.std_tau, summary.stderr_tau,
                    summary.error_rate, summary.n_trials, summary.truncated)


def config_for(config: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    """Copy of ``config`` with ``delta`` or ``epsilon`` set to ``value``.

    Sweeping epsilon moves the true and assumed contamination together; the
    trim fraction follows ``epsilon / 2`` unless ``alpha`` is overridden.
    """
    if parameter == "delta":
        return config.replace(delta=float(value))
    if parameter == "epsilon":
        c = dataclasses.replace(config.contamination, epsilon=float(value), epsilon_assumed=None)
        return config.replace(contamination=c)
    raise ConfigError(f"sweep parameter must be 'delta' or 'epsilon', got {parameter!r}")


def single_row_table(config: ExperimentConfig, summary: ExperimentSummary) -> SweepTable:
    """One-row table for a plain run, keyed by ``delta``."""
    return SweepTable("delta", (_row(config.delta, config, summary),), config)


def sweep(config: ExperimentConfig, parameter: str, grid: Sequence[float], workers: int = 1,
          on_point: Optional[Callable[[float, ExperimentSummary], None]] = None) -> SweepTable:
    """One :func:`run_experiment` per grid value, rows sorted by value."""
    values = sorted(float(v) for v in grid)
    if not values:
        raise ConfigError("sweep grid is empty")
    configs = [config_for(config, parameter, v) for v in values]
    rows = []
    for v, cfg in zip(values, configs):
        summary = run_experiment(cfg, workers)
        if on_point is not None:
            on_point(v, summary)
        rows.append(_row(v, cfg, summary))
    return SweepTable(parameter, tuple(rows), config)
