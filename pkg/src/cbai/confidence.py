"""Closed-form confidence radii, exploration floors and complexity bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bandit import true_gaps
from .exceptions import ConfigError, InfeasibleError, StateError

__all__ = [
    "RadiusParams",
    "exploration_floor",
    "beta_gap_radius",
    "gamma_se_radius",
    "empirical_radius",
    "cbai_uncertainty",
    "problem_complexity",
    "lower_bound_report",
    "upper_bound_report",
    "LowerBoundReport",
    "UpperBoundReport",
]


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")


def _zeta_upper(beta: float, terms: int = 10_000) -> float:
    # partial sum plus integral tail bound of sum_{t>=1} t^-beta
    t = np.arange(1, terms + 1, dtype=float)
    return float(np.sum(t ** -beta)) + terms ** (1.0 - beta) / (beta - 1.0)


@dataclass(frozen=True)
class RadiusParams:
    """Constants shared by the confidence radii.

    ``epsilon`` is the contamination bound the algorithm assumes. ``c_const``
    is ``1 + 1/(beta_exp - 1)``, an upper bound on ``sum_t t^-beta_exp``.
    """

    sigma: float
    epsilon: float
    K: int
    delta: float
    beta_exp: float = 2.0
    c1_uncertainty: float = 1.0
    c_const: float = field(init=False)

    def __post_init__(self):
        for name in ("sigma", "epsilon", "delta", "beta_exp", "c1_uncertainty"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if not 0.0 <= self.epsilon < 0.5:
            raise ConfigError(f"epsilon must lie in [0, 0.5), got {self.epsilon}")
        if int(self.K) != self.K or self.K < 2:
            raise ConfigError(f"K must be an integer >= 2, got {self.K}")
        _check_delta(self.delta)
        if not self.beta_exp > 1:
            raise ConfigError(f"beta_exp must be > 1, got {self.beta_exp}")
        if self.c1_uncertainty < 0:
            raise ConfigError(f"c1_uncertainty must be >= 0, got {self.c1_uncertainty}")
        c = 1.0 + 1.0 / (self.beta_exp - 1.0)
        if c < _zeta_upper(self.beta_exp) * (1 - 1e-12):
            raise ConfigError(f"C = {c} does not dominate sum t^-{self.beta_exp}")
        object.__setattr__(self, "c_const", c)

    @property
    def prefactor(self) -> float:
        return self.sigma / (1.0 - self.epsilon)


def exploration_floor(alpha: float, delta: float) -> float:
    """Per-arm forced-exploration budget ``(2 / alpha**2) * ln(1 / delta)``.

    ``alpha = 0`` (no trimming) returns 0, so the attack-free policy has no floor.
    """
    _check_delta(delta)
    if not 0.0 <= alpha < 0.5:
        raise ConfigError(f"alpha must lie in [0, 0.5), got {alpha}")
    if alpha == 0:
        return 0.0
    return 2.0 / alpha**2 * math.log(1.0 / delta)


def beta_gap_radius(params: RadiusParams, n_pulls: int, t: int) -> float:
    """Gap-based radius ``sigma/(1-eps) * sqrt(2/N * ln((K-1) C t^beta / delta))``."""
    if n_pulls < 1:
        raise StateError("radius undefined for an arm with zero pulls")
    if t < 1:
        raise ConfigError(f"t must be >= 1, got {t}")
    p = params
    log_term = math.log((p.K - 1) * p.c_const / p.delta) + p.beta_exp * math.log(t)
    return p.prefactor * math.sqrt(2.0 / n_pulls * log_term)


def gamma_se_radius(params: RadiusParams, t: int) -> float:
    """Elimination radius ``sigma/(1-eps) * sqrt(2/t * ln(K t^2 pi^2 / (12 delta)))``."""
    if t < 1:
        raise ConfigError(f"t must be >= 1, got {t}")
    p = params
    log_term = math.log(p.K * math.pi**2 / (12.0 * p.delta)) + 2.0 * math.log(t)
    return p.prefactor * math.sqrt(2.0 / t * log_term)


def empirical_radius(sigma: float, delta: float, n_pulls: int, t: int) -> float:
    """Tightened radius ``sigma * sqrt(2/N * ln(ln t / delta))``, with ``t`` floored at 3."""
    if n_pulls < 1:
        raise StateError("radius undefined for an arm with zero pulls")
    return sigma * math.sqrt(2.0 / n_pulls * math.log(math.log(max(t, 3)) / delta))


def cbai_uncertainty(sigma: float, epsilon: float, c1: float = 1.0) -> float:
    """Estimation uncertainty ``c1 * sigma * eps * sqrt(ln(1/eps))`` (0 at eps = 0)."""
    if not 0.0 <= epsilon < 1.0:
        raise ConfigError(f"epsilon must lie in [0, 1), got {epsilon}")
    if epsilon == 0:
        return 0.0
    return c1 * sigma * epsilon * math.sqrt(math.log(1.0 / epsilon))


def _best_and_runner_up(gaps, best):
    others = [g for i, g in enumerate(gaps) if i != best]
    return min(others)


def problem_complexity(means: Sequence[float], uncertainties: Optional[Sequence[float]] = None, sigma: float = 1.0) -> float:
    """``H = sum_i (sqrt(2) sigma / max(gap_i, gap_second_best))**2``.

    The second-best gap is the smallest gap among suboptimal arms.
    """
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    mu = np.asarray(means, dtype=float)
    if mu.size < 2:
        raise ConfigError("problem complexity needs at least two arms")
    gaps = true_gaps(mu, uncertainties)
    best = int(np.argmax(mu))
    gap_b = _best_and_runner_up(gaps, best)
    if not gap_b > 0:
        raise InfeasibleError(f"second-best gap {gap_b} is not positive")
    denom = np.maximum(gaps, gap_b)
    return float(np.sum(2.0 * sigma**2 / denom**2))


@dataclass(frozen=True)
class LowerBoundReport:
    """Asymptotic slopes of ``E[tau] / ln(1/delta)`` and the implied tau at ``delta``."""

    asymptotic_slope_pibai: float
    asymptotic_slope_cbai: float
    uncertainty: float
    delta: float

    @property
    def tau_pibai(self) -> float:
        return self.asymptotic_slope_pibai * math.log(1.0 / self.delta)

    @property
    def tau_cbai(self) -> float:
        return self.asymptotic_slope_cbai * math.log(1.0 / self.delta)


def lower_bound_report(H: float, delta: float, epsilon: float, sigma: float, means: Sequence[float], c1: float = 1.0) -> LowerBoundReport:
    """Lower-bound slopes for a given instance.

    The uncontaminated slope is ``H``. The contaminated slope subtracts
    ``c1 * sigma * eps * sqrt(ln(1/eps))`` from each raw gap
    ``max(mu_best - mu_i, mu_best - mu_second)``.
    """
    _check_delta(delta)
    mu = np.asarray(means, dtype=float)
    if mu.size < 2:
        raise ConfigError("lower bound needs at least two arms")
    best = int(np.argmax(mu))
    raw = mu[best] - mu
    raw_b = min(r for i, r in enumerate(raw) if i != best)
    u = cbai_uncertainty(sigma, epsilon, c1)
    eff = np.maximum(raw, raw_b) - u
    if np.any(eff <= 0):
        i = int(np.argmax(eff <= 0))
        raise InfeasibleError(
            f"effective gap of arm {i} is {eff[i]:.6g} <= 0 after subtracting uncertainty {u:.6g}; "
            "the best arm is not identifiable"
        )
    slope = float(np.sum(2.0 * sigma**2 / eff**2))
    return LowerBoundReport(float(H), slope, u, delta)


@dataclass(frozen=True)
class UpperBoundReport:
    """Evaluated achievability formulas. Infinite entries mean ``epsilon = 0``."""

    gap_slope: float
    gap_slope_proof_form: float
    gap_slope_with_c1: float
    se_bound: float
    se_contamination_term: float
    se_instance_term: float
    notes: tuple


def upper_bound_report(
    means: Sequence[float],
    sigma: float,
    epsilon: float,
    delta: float,
    beta_exp: float = 2.0,
    c1: float = 1.0,
    uncertainties: Optional[Sequence[float]] = None,
) -> UpperBoundReport:
    """Gap-based slopes ``max{8K/eps^2, 64 beta H}`` and ``max{8K/eps^2, 16 beta H/(1-eps)^2}``.

    Also evaluates the same max with ``c1``-reduced gaps, and the
    elimination bound ``max{(8K/eps^2) ln(1/delta), sum_{i != best} ln(K/(delta gap_i)) / gap_i^2}``.
    The elimination instance term carries a multiplicative constant that is not
    specified; it is reported with constant 1.
    """
    _check_delta(delta)
    mu = np.asarray(means, dtype=float)
    K = mu.size
    H = problem_complexity(mu, uncertainties, sigma)
    notes = []
    if epsilon > 0:
        contamination = 8.0 * K / epsilon**2
    else:
        contamination = math.inf
        notes.append("contamination term 8K/eps^2 diverges: bounds are only valid for eps > 0")
    best = int(np.argmax(mu))
    raw = mu[best] - mu
    raw_b = min(r for i, r in enumerate(raw) if i != best)
    u2 = 2.0 * cbai_uncertainty(sigma, epsilon, c1)
    eff = np.maximum(raw, raw_b) - u2
    if np.all(eff > 0):
        h_c1 = float(np.sum(2.0 * sigma**2 / eff**2))
        with_c1 = max(contamination, 64.0 * beta_exp * h_c1)
    else:
        with_c1 = math.inf
        notes.append("c1-reduced gaps are non-positive; the reduced-gap bound is vacuous")
    gaps = true_gaps(mu, uncertainties)
    inst = float(sum(math.log(K / (delta * g)) / g**2 for i, g in enumerate(gaps) if i != best))
    se_cont = contamination * math.log(1.0 / delta)
    notes.append("elimination instance term has an unspecified O(.) constant; shown with constant 1")
    return UpperBoundReport(
        gap_slope=max(contamination, 64.0 * beta_exp * H),
        gap_slope_proof_form=max(contamination, 16.0 * beta_exp * H / (1.0 - epsilon) ** 2),
        gap_slope_with_c1=with_c1,
        se_bound=max(se_cont, inst),
        se_contamination_term=se_cont,
        se_instance_term=inst,
        notes=tuple(notes),
    )
