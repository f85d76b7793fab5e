"""Sequential identification policies.

Two families share :class:`PolicyState`:

* gap-based (``gcbai``, ``random_gap``): sample until the upper end of the
  most ambiguous arm's interval drops below the lower end of the empirical
  best arm's interval, but never before ``ceil(K * T)`` pulls, where ``T`` is
  the per-arm exploration floor.
* successive elimination (``secbai``, ``median_se``): pull every active arm
  once per round and drop arms whose estimate falls ``2 * gamma_t`` below
  the leader once they have ``T`` pulls.

Ties are always broken towards the lowest arm index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

from .confidence import RadiusParams, empirical_radius, exploration_floor
from .estimators import ArmStatistics
from .exceptions import ConfigError, StateError

__all__ = [
    "POLICIES",
    "RADIUS_MODES",
    "PolicyState",
    "record_pull",
    "current_radii",
    "forced_arm",
    "gap_decision",
    "exploit_arm",
    "se_survivors",
    "gcbai_select_arm",
    "gcbai_overlap",
    "gcbai_should_stop",
    "random_policy_select",
    "secbai_step",
    "median_se_step",
    "recommendation",
]

POLICIES = ("gcbai", "secbai", "median_se", "random_gap")
GAP_POLICIES = ("gcbai", "random_gap")
SE_POLICIES = ("secbai", "median_se")
RADIUS_MODES = ("theorem", "empirical")
ESTIMATORS = ("trimmed", "median", "mean")


@dataclass
class PolicyState:
    """Mutable state of one policy run.

    ``t`` counts pulls so far. ``overlap`` is the last evaluated overlap; it is
    reset to ``inf`` on forced-exploration rounds, where it is not evaluated.
    """

    K: int
    params: Optional[RadiusParams]
    alpha: float
    floor: float
    radius_mode: str = "theorem"
    estimator: str = "trimmed"
    stats: List[ArmStatistics] = field(default_factory=list)
    estimates: List[float] = field(default_factory=list)
    t: int = 0
    best: Optional[int] = None
    ambiguous: Optional[int] = None
    overlap: float = math.inf
    stopped: bool = False
    counts: List[int] = field(default_factory=list)
    active: List[int] = field(default_factory=list)
    round: int = 0
    eliminations: List[tuple] = field(default_factory=list)

    @classmethod
    def create(
        cls,
        K: int,
        sigma: float,
        epsilon: float,
        delta: float,
        alpha: Optional[float] = None,
        beta_exp: float = 2.0,
        radius_mode: str = "theorem",
        estimator: str = "trimmed",
    ) -> "PolicyState":
        """Fresh state. ``alpha`` defaults to ``epsilon / 2``; the median and mean
        estimators ignore it for estimation but keep it for the exploration floor."""
        if int(K) != K or K < 1:
            raise ConfigError(f"K must be a positive integer, got {K}")
        if radius_mode not in RADIUS_MODES:
            raise ConfigError(f"radius_mode must be one of {RADIUS_MODES}, got {radius_mode!r}")
        if estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
        if alpha is None:
            alpha = epsilon / 2.0
        floor = exploration_floor(alpha, delta)
        params = RadiusParams(sigma, epsilon, K, delta, beta_exp) if K >= 2 else None
        store_alpha = alpha if estimator == "trimmed" else 0.0
        return cls(
            K=K,
            params=params,
            alpha=alpha,
            floor=floor,
            radius_mode=radius_mode,
            estimator=estimator,
            stats=[ArmStatistics(store_alpha) for _ in range(K)],
            estimates=[math.nan] * K,
            counts=[0] * K,
            active=list(range(K)),
        )

    @property
    def stop_time_floor(self) -> int:
        """Earliest admissible stopping time ``ceil(K * T)``."""
        return math.ceil(self.K * self.floor)


def record_pull(state: PolicyState, arm: int, reward: float) -> None:
    """Add one observation to ``arm`` and refresh its estimate."""
    st = state.stats[arm]
    st.insert(reward)
    state.counts[arm] += 1
    state.t += 1
    if state.estimator == "trimmed":
        state.estimates[arm] = st.trimmed_mean()
    elif state.estimator == "median":
        state.estimates[arm] = st.median()
    else:
        state.estimates[arm] = st.mean()


def current_radii(state: PolicyState, t: Optional[int] = None) -> List[float]:
    """Per-arm confidence radii at round ``t`` (defaults to the current pull count)."""
    p = state.params
    if p is None:
        raise StateError("radii are undefined for a single-arm instance")
    t = max(state.t if t is None else t, 1)
    counts = state.counts
    if min(counts) < 1:
        raise StateError("every arm needs at least one pull before radii are defined")
    if state.radius_mode == "empirical":
        return [empirical_radius(p.sigma, p.delta, n, t) for n in counts]
    log_term = math.log((p.K - 1) * p.c_const / p.delta) + p.beta_exp * math.log(t)
    scale = p.prefactor * math.sqrt(2.0 * log_term)
    return [scale / math.sqrt(n) for n in counts]


def _se_radius(state: PolicyState, t: int) -> float:
    p = state.params
    if state.radius_mode == "empirical":
        return empirical_radius(p.sigma, p.delta, t, t)
    log_term = math.log(p.K * math.pi**2 / (12.0 * p.delta)) + 2.0 * math.log(t)
    return p.prefactor * math.sqrt(2.0 / t * log_term)


def forced_arm(counts: Sequence[int], t: int, floor: float) -> Optional[int]:
    """Least-pulled arm with ``N_i < max(sqrt(t), floor)``, or ``None``.

    The square-root comparison is done exactly as ``N_i**2 < t``; ``t`` is
    floored at 1 so unpulled arms are always under-explored.
    """
    tt = max(t, 1)
    chosen = None
    for i, n in enumerate(counts):
        if n < floor or n * n < tt:
            if chosen is None or n < counts[chosen]:
                chosen = i
    return chosen


def gap_decision(estimates: Sequence[float], radii: Sequence[float]):
    """Return ``(best, ambiguous, overlap)`` for a table of estimates and radii.

    ``best`` maximises the estimate. ``ambiguous`` maximises
    ``est_a + rad_a`` over the other arms. ``overlap`` is
    ``est_j + rad_j - (est_best - rad_best)``.
    """
    K = len(estimates)
    if K < 2:
        raise ConfigError("gap decision needs at least two arms")
    best = 0
    for i in range(1, K):
        if estimates[i] > estimates[best]:
            best = i
    amb = -1
    top = -math.inf
    for i in range(K):
        if i == best:
            continue
        u = estimates[i] + radii[i]
        if amb < 0 or u > top:
            amb, top = i, u
    return best, amb, top - (estimates[best] - radii[best])


def exploit_arm(best: int, ambiguous: int, radii: Sequence[float]) -> int:
    """Of ``best`` and ``ambiguous``, the arm with the wider interval (ties go to ``best``)."""
    return ambiguous if radii[ambiguous] > radii[best] else best


def se_survivors(estimates: Sequence[float], counts: Sequence[int], active: Sequence[int], gamma: float, floor: float) -> List[int]:
    """Active arms kept after one elimination test.

    An arm survives if its estimate is within ``2 * gamma`` of the best active
    estimate, or if it has fewer than ``floor`` pulls.
    """
    lead = max(estimates[i] for i in active)
    thr = lead - 2.0 * gamma
    return [i for i in active if estimates[i] >= thr or counts[i] < floor]


def gcbai_overlap(state: PolicyState) -> float:
    """Evaluate and store the overlap ``B_t`` from the current estimates."""
    if state.K < 2:
        raise StateError("overlap is undefined for a single-arm instance")
    radii = current_radii(state)
    state.best, state.ambiguous, state.overlap = gap_decision(state.estimates, radii)
    return state.overlap


def gcbai_select_arm(state: PolicyState) -> int:
    """Arm to pull next under the gap-based sampling rule.

    While some arm is under-explored the least-pulled one is returned and the
    overlap is marked unevaluated. Otherwise the overlap is refreshed and the
    wider of the empirical best and most ambiguous arms is returned.
    """
    if state.stopped:
        raise StateError("policy has already stopped")
    if state.K == 1:
        return 0
    arm = forced_arm(state.counts, state.t, state.floor)
    if arm is not None:
        state.overlap = math.inf
        return arm
    radii = current_radii(state)
    state.best, state.ambiguous, state.overlap = gap_decision(state.estimates, radii)
    return exploit_arm(state.best, state.ambiguous, radii)


def gcbai_should_stop(state: PolicyState) -> bool:
    """True iff ``t >= ceil(K * T)`` and the stored overlap is ``<= 0``."""
    return state.t >= state.stop_time_floor and state.overlap <= 0


def random_policy_select(state: PolicyState, arm_stream) -> int:
    """Uniform arm from the trial's policy stream."""
    if state.stopped:
        raise StateError("policy has already stopped")
    if state.K == 1:
        return 0
    return arm_stream.next()


def _elimination_step(state: PolicyState, reward_fn: Callable[[int, int], float]) -> PolicyState:
    if state.stopped:
        raise StateError("policy has already stopped")
    if len(state.active) <= 1:
        raise StateError("elimination step needs more than one active arm")
    state.round += 1
    for arm in state.active:
        record_pull(state, arm, reward_fn(arm, state.t + 1))
    gamma = _se_radius(state, state.round)
    counts = state.counts
    kept = se_survivors(state.estimates, counts, state.active, gamma, state.floor)
    if len(kept) < len(state.active):
        gone = set(state.active) - set(kept)
        for arm in sorted(gone):
            state.eliminations.append((arm, state.t, counts[arm]))
        state.active = kept
    if len(state.active) == 1:
        state.stopped = True
    return state


def secbai_step(state: PolicyState, reward_fn: Callable[[int, int], float]) -> PolicyState:
    """One elimination round with the trimmed-mean estimator.

    ``reward_fn(arm, t)`` returns the observation for a pull of ``arm`` at
    round ``t``. Active arms are pulled in ascending index order.
    """
    if state.estimator != "trimmed":
        raise ConfigError(f"secbai_step expects the trimmed estimator, state uses {state.estimator!r}")
    return _elimination_step(state, reward_fn)


def median_se_step(state: PolicyState, reward_fn: Callable[[int, int], float]) -> PolicyState:
    """One elimination round with the empirical-median estimator."""
    if state.estimator != "median":
        raise ConfigError(f"median_se_step expects the median estimator, state uses {state.estimator!r}")
    return _elimination_step(state, reward_fn)


def recommendation(state: PolicyState) -> int:
    """Arm returned at stopping: highest estimate among surviving arms."""
    pool = state.active if len(state.active) < state.K else range(state.K)
    best = None
    for i in pool:
        e = state.estimates[i]
        if math.isnan(e):
            continue
        if best is None or e > state.estimates[best]:
            best = i
    return 0 if best is None else best
