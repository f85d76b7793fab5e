import json
import math

import pytest

from cbai.bandit import ArmDistribution, BanditInstance, ContaminationModel
from cbai.exceptions import AssumptionError, ConfigError
from cbai.harness import (
    CSV_HEADER,
    ExperimentConfig,
    config_for,
    run_experiment,
    run_trial,
    run_trials,
    single_row_table,
    summarize,
    sweep,
)

K4 = BanditInstance.gaussian([2.5, 2.3, 2.0, 0.6])
SHIFT = ContaminationModel(0.1, "fixed_shift", shift=5.0)


def small(policy="gcbai", **kw):
    base = dict(instance=BanditInstance.gaussian([1.0, 0.0]), contamination=ContaminationModel(0.2, "fixed_shift", shift=3.0),
                policy=policy, delta=0.1, n_trials=6, master_seed=11)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    for bad in (dict(policy="ucb"), dict(radius_mode="loose"), dict(delta=0.0), dict(delta=1.0),
                dict(n_trials=0), dict(alpha=0.5), dict(beta_exp=1.0), dict(max_rounds=0)):
        with pytest.raises(ConfigError):
            small(**bad)
    with pytest.raises(AssumptionError):
        ExperimentConfig(BanditInstance((ArmDistribution.gaussian(1, 1),) * 2))
    assert small().effective_alpha == pytest.approx(0.1)
    assert small(alpha=0.2).effective_alpha == 0.2


def test_single_arm_trial():
    cfg = ExperimentConfig(BanditInstance.gaussian([3.0]), SHIFT, "gcbai", n_trials=1)
    r = run_trial(cfg, 0)
    assert (r.tau, r.recommended, r.correct, r.truncated) == (1, 0, True, False)
    for p in ("secbai", "median_se", "random_gap"):
        assert run_trial(cfg.replace(policy=p), 0).tau == 1


@pytest.mark.parametrize("policy", ["gcbai", "secbai", "median_se", "random_gap"])
def test_trial_replay_is_identical(policy):
    cfg = small(policy)
    a = run_trial(cfg, 3)
    b = run_trial(cfg, 3)
    assert (a.tau, a.recommended, a.pulls, a.eliminations) == (b.tau, b.recommended, b.pulls, b.eliminations)
    assert a.tau == sum(a.pulls) >= 2


def test_four_arm_gcbai_floor():
    r = run_trial(ExperimentConfig(K4, SHIFT, "gcbai", delta=0.1, n_trials=1, master_seed=2024), 0)
    assert r.tau >= 7369


def test_worker_count_does_not_change_results():
    cfg = small("random_gap", n_trials=8)
    serial = run_experiment(cfg, workers=1)
    parallel = run_experiment(cfg, workers=3)
    assert [r.tau for r in serial.results] == [r.tau for r in parallel.results]
    assert single_row_table(cfg, serial).to_csv() == single_row_table(cfg, parallel).to_csv()


def test_prefix_reproducibility():
    cfg = small("secbai", n_trials=4)
    first = run_trials(cfg)
    doubled = run_trials(cfg.replace(n_trials=8))
    assert [(r.tau, r.recommended) for r in first] == [(r.tau, r.recommended) for r in doubled[:4]]
    assert run_trials(cfg, indices=[2])[0].tau == first[2].tau


def test_summary_single_trial_and_welford():
    cfg = small(n_trials=1)
    s = run_experiment(cfg)
    assert s.mean_tau == s.results[0].tau and s.std_tau == 0 and s.stderr_tau == 0 and not s.stderr_defined
    s5 = run_experiment(small(n_trials=5))
    taus = [r.tau for r in s5.results]
    m = sum(taus) / 5
    sd = math.sqrt(sum((t - m) ** 2 for t in taus) / 4)
    assert s5.mean_tau == pytest.approx(m) and s5.std_tau == pytest.approx(sd)
    assert s5.stderr_tau == pytest.approx(sd / math.sqrt(5))
    assert 0 <= s5.ci_low <= s5.error_rate <= s5.ci_high <= 1
    with pytest.raises(ConfigError):
        summarize([])


def test_truncation_is_flagged():
    cfg = small("gcbai", n_trials=2, max_rounds=50)
    s = run_experiment(cfg)
    assert s.truncated == 2
    assert all(r.tau <= 50 and r.truncated for r in s.results)
    se = run_experiment(small("secbai", n_trials=2, max_rounds=51))
    assert se.truncated == 2 and all(r.tau <= 51 for r in se.results)


def test_csv_format():
    cfg = small(n_trials=3)
    text = single_row_table(cfg, run_experiment(cfg)).to_csv()
    assert "\r" not in text
    lines = text.split("\n")
    assert lines[0].startswith("# config: ")
    meta = json.loads(lines[0][len("# config: "):])
    assert meta["delta"] == 0.1 and meta["policy"] == "gcbai" and meta["master_seed"] == 11
    assert lines[1] == ",".join(CSV_HEADER)
    cells = lines[2].split(",")
    assert cells[1] == "gcbai" and cells[6] == "3"
    for c in cells[2:5]:
        assert len(c.replace(".", "").replace("-", "").lstrip("0")) <= 6
    assert text.endswith("\n") and lines[-1] == ""
    plain = single_row_table(cfg, run_experiment(cfg)).to_csv(header_comment=False)
    assert plain.split("\n")[0] == ",".join(CSV_HEADER)


def test_sweep_rows_sorted_and_errors():
    cfg = small(n_trials=2)
    table = sweep(cfg, "delta", [0.2, 0.05, 0.1])
    assert [r.param for r in table.rows] == [0.05, 0.1, 0.2]
    assert len(sweep(cfg, "delta", [0.1]).rows) == 1
    with pytest.raises(ConfigError):
        sweep(cfg, "delta", [])
    with pytest.raises(ConfigError):
        sweep(cfg, "sigma", [1.0])
    with pytest.raises(ConfigError):
        sweep(cfg, "epsilon", [0.6])


def test_epsilon_sweep_moves_assumed_epsilon():
    cfg = small(contamination=ContaminationModel(0.1, "fixed_shift", shift=3.0, epsilon_assumed=0.2))
    c = config_for(cfg, "epsilon", 0.15)
    assert c.contamination.epsilon == 0.15 and c.contamination.assumed_epsilon == 0.15
    assert c.effective_alpha == pytest.approx(0.075)


def test_trace_records():
    recs = []
    r = run_trial(small("secbai"), 0, recs.append)
    assert len(recs) == r.tau
    assert [x["t"] for x in recs] == list(range(1, r.tau + 1))
    assert set(recs[0]) == {"t", "arm", "reward", "contaminated", "active"}
    line = json.loads(r.to_json())
    assert list(line) == ["trial", "tau", "recommended", "correct", "truncated"]
