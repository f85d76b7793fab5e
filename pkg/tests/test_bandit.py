import math

import numpy as np
import pytest

from cbai.bandit import (
    ArmDistribution,
    ArmStream,
    BanditInstance,
    ContaminationModel,
    RewardTape,
    SeedSpec,
    sample_reward,
    stream_generator,
    true_gaps,
)
from cbai.exceptions import AssumptionError, ConfigError

K4 = [2.5, 2.3, 2.0, 0.6]


def test_true_gaps_four_arm():
    np.testing.assert_allclose(true_gaps(K4), [0.0, 0.2, 0.5, 1.9], atol=1e-12)


def test_true_gaps_with_uncertainty():
    np.testing.assert_allclose(true_gaps([1.0, 0.0]), [0.0, 1.0])
    g = true_gaps([1.0, 0.9], [0.04, 0.04])
    assert g[1] == pytest.approx(0.02)
    # the best arm's own entry is -2 U_best, not clamped
    assert g[0] == pytest.approx(-0.08)
    with pytest.raises(AssumptionError) as ei:
        true_gaps([1.0, 0.9], [0.1, 0.1])
    assert ei.value.arm == 1


def test_instance_rejects_tie_and_overlap():
    with pytest.raises(AssumptionError):
        BanditInstance.gaussian([1.0, 1.0])
    with pytest.raises(AssumptionError):
        BanditInstance.gaussian([1.0, 0.9], uncertainty=[0.1, 0.0])
    inst = BanditInstance.gaussian(K4)
    assert inst.K == 4 and inst.best_arm() == 0 and inst.second_best() == 1
    np.testing.assert_allclose(inst.gaps(), [0.0, 0.2, 0.5, 1.9], atol=1e-12)
    assert BanditInstance.gaussian([3.0]).K == 1


def test_distribution_means():
    assert ArmDistribution.gaussian(1.5, 2.0).true_mean() == 1.5
    assert ArmDistribution.exponential(3.0).true_mean() == 3.0
    assert ArmDistribution.lognormal(1.05, 1.2).true_mean() == pytest.approx(math.exp(1.05 + 0.72))
    assert ArmDistribution.bernoulli(0.3).true_mean() == 0.3
    for bad in (lambda: ArmDistribution.gaussian(0, -1), lambda: ArmDistribution.exponential(0),
                lambda: ArmDistribution.bernoulli(1.5), lambda: ArmDistribution("cauchy", (0.0,))):
        with pytest.raises(ConfigError):
            bad()


@pytest.mark.parametrize("arm", [ArmDistribution.gaussian(1.0, 2.0), ArmDistribution.exponential(2.0),
                                 ArmDistribution.lognormal(0.0, 0.5), ArmDistribution.bernoulli(0.3)])
def test_sample_moments(arm):
    x = arm.sample(np.random.default_rng(1), 200_000)
    assert x.mean() == pytest.approx(arm.true_mean(), rel=0.02, abs=0.01)


def test_contamination_validation():
    with pytest.raises(ConfigError):
        ContaminationModel(0.6)
    with pytest.raises(ConfigError):
        ContaminationModel(0.5)
    with pytest.raises(ConfigError):
        ContaminationModel(0.1, "sneaky")
    assert ContaminationModel(0.1, epsilon_assumed=0.2).assumed_epsilon == 0.2


def test_contaminated_means_and_preservation():
    inst = BanditInstance.gaussian([1.0, 0.0])
    c = ContaminationModel(0.1, "fixed_shift", shift=5.0)
    np.testing.assert_allclose(c.contaminated_means(inst), [1.5, 0.5])
    assert c.preserves_best(inst)
    u = ContaminationModel(0.4, "uniform_random_mean", per_arm_means=(0.0, 10.0))
    assert not u.preserves_best(inst, np.array([0.0, 10.0]))
    with pytest.raises(AssumptionError):
        RewardTape(inst, u, 0, 0)


def test_random_adversary_means_preserve_best():
    inst = BanditInstance.gaussian(K4)
    c = ContaminationModel(0.2, "uniform_random_mean")
    for trial in range(50):
        m = c.draw_adversarial_means(inst, 3, trial)
        assert np.all((m >= 0.6) & (m <= 2.5))
        assert c.preserves_best(inst, m)


def test_streams_are_deterministic_and_distinct():
    a = stream_generator(5, 2, "natural_reward", 0).random(4)
    b = stream_generator(5, 2, "natural_reward", 0).random(4)
    np.testing.assert_array_equal(a, b)
    for other in [(5, 2, "corruption_coin", 0), (5, 3, "natural_reward", 0), (6, 2, "natural_reward", 0),
                  (5, 2, "natural_reward", 1)]:
        assert not np.array_equal(a, stream_generator(*other).random(4))
    with pytest.raises(ConfigError):
        SeedSpec(1, 0, "mystery")


def test_reward_is_pure_function_of_keys():
    inst = BanditInstance.gaussian(K4)
    c = ContaminationModel(0.1, "fixed_shift", shift=5.0)
    t1 = RewardTape(inst, c, 9, 4)
    t2 = RewardTape(inst, c, 9, 4)
    # access order must not matter
    forward = [t1.reward(arm, t) for t in range(1, 5000, 37) for arm in range(4)]
    backward = [t2.reward(arm, t) for t in reversed(range(1, 5000, 37)) for arm in reversed(range(4))]
    assert forward == list(reversed(backward))
    assert sample_reward(inst, c, 2, 100, SeedSpec(9, 4)) == t1.reward(2, 100)[0]
    with pytest.raises(ConfigError):
        sample_reward(inst, c, 4, 1, SeedSpec(9, 4))


def test_corruption_frequency_and_shift():
    inst = BanditInstance.gaussian([0.0, -1.0])
    c = ContaminationModel(0.1, "fixed_shift", shift=10.0)
    tape = RewardTape(inst, c, 0, 0)
    obs = [tape.reward(0, t) for t in range(1, 40_001)]
    flags = np.array([f for _, f in obs])
    vals = np.array([v for v, _ in obs])
    assert flags.mean() == pytest.approx(0.1, abs=0.006)
    assert vals[flags].mean() == pytest.approx(10.0, abs=0.05)
    assert vals[~flags].mean() == pytest.approx(0.0, abs=0.02)


def test_inactive_contamination_never_flags():
    inst = BanditInstance.gaussian([0.0, -1.0])
    for c in (ContaminationModel(0.0, "fixed_shift", shift=10.0), ContaminationModel(0.3, "none")):
        tape = RewardTape(inst, c, 0, 0)
        assert not any(tape.reward(0, t)[1] for t in range(1, 2000))
    # epsilon = 0 sees exactly the natural stream
    clean = RewardTape(inst, ContaminationModel(0.0), 0, 0)
    shifted = RewardTape(inst, ContaminationModel(0.0, "fixed_shift", shift=3.0), 0, 0)
    assert [clean.reward(1, t) for t in range(1, 100)] == [shifted.reward(1, t) for t in range(1, 100)]


def test_arm_stream_uniform_and_reproducible():
    s = ArmStream(4, 11, 0)
    xs = np.array([s.next() for _ in range(100_000)])
    freq = np.bincount(xs, minlength=4) / xs.size
    np.testing.assert_allclose(freq, 0.25, atol=0.005)
    s2 = ArmStream(4, 11, 0)
    assert [s2.next() for _ in range(5000)] == xs[:5000].tolist()
    assert all(ArmStream(1, 0, 0).next() == 0 for _ in range(10))
