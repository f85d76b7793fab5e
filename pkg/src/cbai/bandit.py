"""Bandit instances, Huber contamination models and seeded reward generation.

Rewards follow the contaminated observation model: at round ``t`` a coin
``D_t ~ Bern(epsilon)`` decides whether the learner sees the natural sample
``X_{arm,t} ~ P_arm`` or an adversarial sample ``X'_{arm,t} ~ Q_arm``.

All randomness is drawn from counter-based Philox streams keyed by
``(master_seed, trial_index, stream, block)``, so the value at round ``t`` is a
pure function of those keys and never depends on which arms the policy pulled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import AssumptionError, ConfigError

__all__ = [
    "ArmDistribution",
    "BanditInstance",
    "ContaminationModel",
    "SeedSpec",
    "RewardTape",
    "ArmStream",
    "sample_reward",
    "true_gaps",
    "stream_generator",
    "BLOCK_SIZE",
]

#: Rounds generated per stream block. Part of the seeding scheme: changing it
#: changes every drawn value.
BLOCK_SIZE = 4096

STREAMS = {
    "natural_reward": 0,
    "corruption_coin": 1,
    "adversarial_sample": 2,
    "policy": 3,
}

# spawn-key block index reserved for once-per-trial adversary setup draws
_SETUP_BLOCK = 2**31

_MASK64 = (1 << 64) - 1

MAX_ADVERSARY_RESAMPLES = 100

ARM_KINDS = ("gaussian", "exponential", "lognormal", "bernoulli")
ADVERSARIES = ("none", "fixed_shift", "uniform_random_mean")


def stream_generator(master_seed: int, trial_index: int, stream: str, block: int) -> np.random.Generator:
    """Return the Philox generator for one block of one stream of one trial.

    The key is ``SeedSequence(entropy=master_seed mod 2**64,
    spawn_key=(trial_index, stream_code, block))`` with stream codes
    natural_reward=0, corruption_coin=1, adversarial_sample=2, policy=3.
    """
    if trial_index < 0:
        raise ConfigError(f"trial_index must be >= 0, got {trial_index}")
    try:
        code = STREAMS[stream]
    except KeyError:
        raise ConfigError(f"unknown stream {stream!r}; expected one of {sorted(STREAMS)}") from None
    seq = np.random.SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=(int(trial_index), code, int(block)))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class ArmDistribution:
    """Reward law ``P_i`` of a single arm.

    Use the named constructors rather than building ``params`` by hand.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in ARM_KINDS:
            raise ConfigError(f"unknown arm kind {self.kind!r}")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if not all(math.isfinite(v) for v in p):
            raise ConfigError(f"{self.kind} parameters must be finite, got {p}")
        if self.kind == "gaussian" and p[1] <= 0:
            raise ConfigError(f"gaussian sigma must be > 0, got {p[1]}")
        if self.kind == "exponential" and p[0] <= 0:
            raise ConfigError(f"exponential mean must be > 0, got {p[0]}")
        if self.kind == "lognormal" and p[1] <= 0:
            raise ConfigError(f"lognormal sigma_log must be > 0, got {p[1]}")
        if self.kind == "bernoulli" and not 0.0 <= p[0] <= 1.0:
            raise ConfigError(f"bernoulli p must lie in [0, 1], got {p[0]}")

    @classmethod
    def gaussian(cls, mean, sigma=1.0):
        return cls("gaussian", (mean, sigma))

    @classmethod
    def exponential(cls, mean):
        return cls("exponential", (mean,))

    @classmethod
    def lognormal(cls, mu_log, sigma_log):
        return cls("lognormal", (mu_log, sigma_log))

    @classmethod
    def bernoulli(cls, p):
        return cls("bernoulli", (p,))

    def true_mean(self) -> float:
        p = self.params
        if self.kind == "lognormal":
            return math.exp(p[0] + 0.5 * p[1] ** 2)
        return p[0]

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        p = self.params
        if self.kind == "gaussian":
            return p[0] + p[1] * rng.standard_normal(size)
        if self.kind == "exponential":
            return rng.exponential(p[0], size)
        if self.kind == "lognormal":
            return rng.lognormal(p[0], p[1], size)
        return (rng.random(size) < p[0]).astype(np.float64)


def _argmax_lowest(values: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best]:
            best = i
    return best


def true_gaps(means: Sequence[float], uncertainties: Optional[Sequence[float]] = None) -> np.ndarray:
    """Suboptimality gaps ``(mu_best - U_best) - (mu_i + U_i)`` for every arm.

    Raises :class:`AssumptionError` naming the first arm whose interval reaches
    the best arm's lower endpoint, i.e. when the best arm is not identifiable.
    """
    mu = np.asarray(means, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise ConfigError("means must be a non-empty 1-d sequence")
    u = np.zeros_like(mu) if uncertainties is None else np.broadcast_to(np.asarray(uncertainties, dtype=float), mu.shape)
    if np.any(u < 0):
        raise ConfigError("uncertainties must be >= 0")
    best = _argmax_lowest(mu.tolist())
    gaps = (mu[best] - u[best]) - (mu + u)
    for i, g in enumerate(gaps):
        if i != best and not g > 0:
            raise AssumptionError(
                f"best arm {best} is not identifiable: arm {i} has gap {g:.6g} <= 0 "
                f"(mu_best - U_best = {mu[best] - u[best]:.6g}, mu_{i} + U_{i} = {mu[i] + u[i]:.6g})",
                arm=i,
            )
    return gaps


@dataclass(frozen=True)
class BanditInstance:
    """A K-armed bandit with a known sub-Gaussian scale ``sigma_proxy``.

    ``uncertainty`` holds the per-arm ``U_i`` used for the identifiability
    check at construction; it defaults to zero (plain unique-best check).
    """

    arms: tuple
    sigma_proxy: float = 1.0
    uncertainty: Optional[tuple] = None

    def __post_init__(self):
        arms = tuple(self.arms)
        object.__setattr__(self, "arms", arms)
        if len(arms) < 1:
            raise ConfigError("a bandit instance needs at least one arm")
        if not all(isinstance(a, ArmDistribution) for a in arms):
            raise ConfigError("arms must be ArmDistribution objects")
        if not (math.isfinite(self.sigma_proxy) and self.sigma_proxy > 0):
            raise ConfigError(f"sigma_proxy must be > 0, got {self.sigma_proxy}")
        if self.uncertainty is not None:
            u = tuple(float(v) for v in np.broadcast_to(np.asarray(self.uncertainty, dtype=float), (len(arms),)))
            object.__setattr__(self, "uncertainty", u)
        if len(arms) >= 2:
            true_gaps(self.means, self.uncertainty)

    @classmethod
    def gaussian(cls, means, sigma=1.0, uncertainty=None):
        """Gaussian arms sharing ``sigma``, which is also the sub-Gaussian proxy."""
        return cls(tuple(ArmDistribution.gaussian(m, sigma) for m in means), sigma, uncertainty)

    @property
    def K(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([a.true_mean() for a in self.arms])

    def best_arm(self) -> int:
        return _argmax_lowest(self.means.tolist())

    def second_best(self) -> int:
        if self.K < 2:
            raise ConfigError("second_best needs at least two arms")
        mu = self.means.tolist()
        a = self.best_arm()
        rest = [i for i in range(self.K) if i != a]
        return max(rest, key=lambda i: (mu[i], -i))

    def gaps(self) -> np.ndarray:
        return true_gaps(self.means, self.uncertainty)


@dataclass(frozen=True)
class ContaminationModel:
    """Huber contamination with an oblivious adversary.

    ``epsilon`` is the true corruption probability used to generate rewards.
    ``epsilon_assumed`` is the bound handed to the algorithms; it defaults to
    ``epsilon``.

    Adversaries:

    * ``none``: ``Q_i = P_i``, so corruption coins have no effect.
    * ``fixed_shift``: ``Q_i`` is ``P_i`` translated by ``shift``.
    * ``uniform_random_mean``: ``Q_i = Uniform[m_i - half_width, m_i + half_width]``.
      ``m_i`` comes from ``per_arm_means`` when given. Otherwise it is drawn once
      per trial, uniformly on ``mean_range``, which defaults to the span of the
      true means. Draws are repeated until the contaminated means keep the best
      arm's index.
    """

    epsilon: float = 0.0
    adversary: str = "none"
    shift: float = 0.0
    half_width: float = 1.0
    mean_range: Optional[tuple] = None
    per_arm_means: Optional[tuple] = None
    epsilon_assumed: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 0.5:
            raise ConfigError(f"epsilon must lie in [0, 0.5), got {self.epsilon}")
        if self.epsilon_assumed is not None and not 0.0 <= self.epsilon_assumed < 0.5:
            raise ConfigError(f"epsilon_assumed must lie in [0, 0.5), got {self.epsilon_assumed}")
        if self.adversary not in ADVERSARIES:
            raise ConfigError(f"unknown adversary {self.adversary!r}; expected one of {ADVERSARIES}")
        if not math.isfinite(self.shift):
            raise ConfigError("shift must be finite")
        if self.adversary == "uniform_random_mean" and not self.half_width >= 0:
            raise ConfigError(f"half_width must be >= 0, got {self.half_width}")
        if self.mean_range is not None:
            lo, hi = (float(v) for v in self.mean_range)
            if not lo <= hi:
                raise ConfigError(f"mean_range must satisfy low <= high, got {self.mean_range}")
            object.__setattr__(self, "mean_range", (lo, hi))
        if self.per_arm_means is not None:
            object.__setattr__(self, "per_arm_means", tuple(float(v) for v in self.per_arm_means))

    @property
    def assumed_epsilon(self) -> float:
        return self.epsilon if self.epsilon_assumed is None else self.epsilon_assumed

    def contaminated_means(self, instance: BanditInstance, adversarial_means=None) -> np.ndarray:
        """Means of the mixtures ``(1 - eps) P_i + eps Q_i``."""
        mu = instance.means
        eps = self.epsilon
        if self.adversary == "none":
            return mu
        if self.adversary == "fixed_shift":
            return mu + eps * self.shift
        m = np.asarray(adversarial_means if adversarial_means is not None else self.per_arm_means, dtype=float)
        return (1 - eps) * mu + eps * m

    def preserves_best(self, instance: BanditInstance, adversarial_means=None) -> bool:
        if instance.K < 2:
            return True
        cm = self.contaminated_means(instance, adversarial_means)
        a = instance.best_arm()
        return bool(np.all(np.delete(cm, a) < cm[a]))

    def draw_adversarial_means(self, instance: BanditInstance, master_seed: int, trial_index: int) -> Optional[np.ndarray]:
        """Per-trial adversarial means for ``uniform_random_mean``, else ``None``."""
        if self.adversary != "uniform_random_mean":
            return None
        if self.per_arm_means is not None:
            m = np.asarray(self.per_arm_means, dtype=float)
            if m.shape != (instance.K,):
                raise ConfigError(f"per_arm_means has {m.size} entries for {instance.K} arms")
            if not self.preserves_best(instance, m):
                raise AssumptionError("per_arm_means change the index of the best arm")
            return m
        lo, hi = self.mean_range if self.mean_range is not None else (instance.means.min(), instance.means.max())
        rng = stream_generator(master_seed, trial_index, "adversarial_sample", _SETUP_BLOCK)
        for _ in range(MAX_ADVERSARY_RESAMPLES):
            m = rng.uniform(lo, hi, instance.K)
            if self.preserves_best(instance, m):
                return m
        raise AssumptionError(
            f"no adversarial means preserving the best arm after {MAX_ADVERSARY_RESAMPLES} draws "
            f"(trial {trial_index}, mean_range {lo:.6g}..{hi:.6g})"
        )


@dataclass(frozen=True)
class SeedSpec:
    """Seed keys for one trial. ``stream`` selects one of the named streams."""

    master_seed: int
    trial_index: int = 0
    stream: str = "natural_reward"

    def __post_init__(self):
        if self.trial_index < 0:
            raise ConfigError(f"trial_index must be >= 0, got {self.trial_index}")
        if self.stream not in STREAMS:
            raise ConfigError(f"unknown stream {self.stream!r}")

    def generator(self, block: int = 0) -> np.random.Generator:
        return stream_generator(self.master_seed, self.trial_index, self.stream, block)


class RewardTape:
    """Lazily materialised reward table for one trial.

    ``reward(arm, t)`` returns the observation the learner sees if it pulls
    ``arm`` at round ``t`` (1-based), together with the hidden corruption flag.
    Blocks of ``BLOCK_SIZE`` rounds are generated on first access and cached.
    """

    def __init__(self, instance: BanditInstance, contamination: ContaminationModel, master_seed: int, trial_index: int):
        if contamination.adversary == "uniform_random_mean" and contamination.per_arm_means is not None:
            if len(contamination.per_arm_means) != instance.K:
                raise ConfigError("per_arm_means length does not match the number of arms")
        self.instance = instance
        self.contamination = contamination
        self.master_seed = int(master_seed)
        self.trial_index = int(trial_index)
        self.adversarial_means = contamination.draw_adversarial_means(instance, master_seed, trial_index)
        self._active = contamination.epsilon > 0 and contamination.adversary != "none"
        self._natural = {}
        self._coins = {}
        self._adversarial = {}

    def _gen(self, stream, block):
        return stream_generator(self.master_seed, self.trial_index, stream, block)

    def _natural_block(self, b):
        rng = self._gen("natural_reward", b)
        cols = [arm.sample(rng, BLOCK_SIZE) for arm in self.instance.arms]
        return np.column_stack(cols).tolist()

    def _coin_block(self, b):
        rng = self._gen("corruption_coin", b)
        return (rng.random(BLOCK_SIZE) < self.contamination.epsilon).tolist()

    def _adversarial_block(self, b):
        rng = self._gen("adversarial_sample", b)
        c = self.contamination
        if c.adversary == "fixed_shift":
            cols = [arm.sample(rng, BLOCK_SIZE) + c.shift for arm in self.instance.arms]
        else:
            cols = [m + c.half_width * (2.0 * rng.random(BLOCK_SIZE) - 1.0) for m in self.adversarial_means]
        return np.column_stack(cols).tolist()

    def coin(self, t: int) -> bool:
        """Corruption flag ``D_t``; never consults the stream when inactive."""
        if not self._active:
            return False
        b, off = divmod(t - 1, BLOCK_SIZE)
        block = self._coins.get(b)
        if block is None:
            block = self._coins[b] = self._coin_block(b)
        return block[off]

    def reward(self, arm: int, t: int):
        if t < 1:
            raise ConfigError(f"round index must be >= 1, got {t}")
        b, off = divmod(t - 1, BLOCK_SIZE)
        if self.coin(t):
            block = self._adversarial.get(b)
            if block is None:
                block = self._adversarial[b] = self._adversarial_block(b)
            return block[off][arm], True
        block = self._natural.get(b)
        if block is None:
            block = self._natural[b] = self._natural_block(b)
        return block[off][arm], False


class ArmStream:
    """Uniform arm indices from the dedicated policy stream of a trial."""

    def __init__(self, K: int, master_seed: int, trial_index: int):
        self.K = K
        self.master_seed = master_seed
        self.trial_index = trial_index
        self._block = -1
        self._values = []
        self._pos = 0
        self._n = 0

    def next(self) -> int:
        b, off = divmod(self._n, BLOCK_SIZE)
        if b != self._block:
            rng = stream_generator(self.master_seed, self.trial_index, "policy", b)
            self._values = rng.integers(0, self.K, BLOCK_SIZE).tolist()
            self._block = b
        self._n += 1
        return self._values[off]


def sample_reward(instance: BanditInstance, contamination: ContaminationModel, arm: int, t: int, seeds: SeedSpec) -> float:
    """Observed reward of ``arm`` at round ``t`` for the trial named by ``seeds``."""
    if not 0 <= arm < instance.K:
        raise ConfigError(f"arm index {arm} out of range for K={instance.K}")
    tape = RewardTape(instance, contamination, seeds.master_seed, seeds.trial_index)
    return tape.reward(arm, t)[0]
