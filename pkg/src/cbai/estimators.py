"""Incremental order-statistics store and the robust mean estimators built on it.

:class:`ArmStatistics` keeps every reward of one arm in sorted order
(``sortedcontainers.SortedList``: O(log N) amortised insert and positional
access). For one registered trim fraction it also maintains the sums of the
``k`` smallest and ``k`` largest samples, ``k = floor(alpha * N)``. A
trimmed-mean query at that fraction is therefore O(1). Other fractions fall
back to cached prefix sums over the sorted order.
"""

from __future__ import annotations

import bisect
import math
from typing import Iterable, Optional

import numpy as np
from sortedcontainers import SortedList

from .exceptions import ConfigError, StateError

__all__ = [
    "ArmStatistics",
    "SortedArrayStatistics",
    "trim_count",
    "insert",
    "trimmed_mean",
    "empirical_median",
    "sample_mean",
]

# absorbs float error in alpha * n when the product is meant to be an integer
_TRIM_SLACK = 1e-9


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha < 0.5:
        raise ConfigError(f"trim fraction alpha must lie in [0, 0.5), got {alpha}")
    return alpha


def trim_count(alpha: float, n: int) -> int:
    """Samples discarded on each side: ``floor(alpha * n)``."""
    alpha = _check_alpha(alpha)
    return int(math.floor(alpha * n + _TRIM_SLACK))


class ArmStatistics:
    """Pull count and sorted multiset of rewards for one arm.

    Parameters
    ----------
    alpha : float
        Trim fraction whose tail sums are maintained incrementally.
    samples : iterable of float, optional
        Initial rewards, bulk loaded.
    """

    def __init__(self, alpha: float = 0.0, samples: Optional[Iterable[float]] = None):
        self.alpha = _check_alpha(alpha)
        self._sorted = SortedList()
        self._total = 0.0
        self._low = 0.0
        self._high = 0.0
        self._k = 0
        self._prefix = None
        if samples is not None:
            self._bulk_load(samples)

    def _bulk_load(self, samples):
        values = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise ConfigError("rewards must be finite")
        values = np.sort(values)
        self._sorted = SortedList(values.tolist())
        n = values.size
        k = trim_count(self.alpha, n)
        self._total = float(values.sum())
        self._low = float(values[:k].sum())
        self._high = float(values[n - k:].sum()) if k else 0.0
        self._k = k
        self._prefix = None

    @property
    def count(self) -> int:
        return len(self._sorted)

    def __len__(self):
        return len(self._sorted)

    def __repr__(self):
        return f"ArmStatistics(count={self.count}, alpha={self.alpha})"

    def insert(self, reward: float) -> "ArmStatistics":
        x = float(reward)
        if not math.isfinite(x):
            raise ConfigError(f"reward must be finite, got {reward!r}")
        s = self._sorted
        n_old = len(s)
        k = self._k
        if k:
            low_max = s[k - 1]
            if x < low_max:
                self._low += x - low_max
            high_min = s[n_old - k]
            if x > high_min:
                self._high += x - high_min
        s.add(x)
        self._total += x
        n = n_old + 1
        # alpha validated at construction; int() floors the non-negative product
        k_new = int(self.alpha * n + _TRIM_SLACK)
        if k_new > k:
            self._low += s[k]
            self._high += s[n - k_new]
            self._k = k_new
        self._prefix = None
        return self

    def sorted_view(self) -> list:
        return list(self._sorted)

    def select(self, k: int) -> float:
        """The ``k``-th smallest sample (0-based)."""
        if not 0 <= k < len(self._sorted):
            raise IndexError(f"rank {k} out of range for {len(self._sorted)} samples")
        return self._sorted[k]

    def rank(self, x: float) -> int:
        """Number of samples strictly below ``x``."""
        return self._sorted.bisect_left(x)

    def prefix_sum(self, k: int) -> float:
        """Sum of the ``k`` smallest samples."""
        n = len(self._sorted)
        if not 0 <= k <= n:
            raise IndexError(f"prefix length {k} out of range for {n} samples")
        if self._prefix is None:
            self._prefix = np.concatenate(([0.0], np.cumsum(np.fromiter(self._sorted, dtype=float, count=n))))
        return float(self._prefix[k])

    def mean(self) -> float:
        n = len(self._sorted)
        if n == 0:
            raise StateError("no samples recorded")
        return self._total / n

    def trimmed_mean(self, alpha: Optional[float] = None) -> float:
        n = len(self._sorted)
        if alpha is None or alpha == self.alpha:
            if n == 0:
                raise StateError("no samples recorded")
            return (self._total - self._low - self._high) / (n - 2 * self._k)
        alpha = _check_alpha(alpha)
        if n == 0:
            raise StateError("no samples recorded")
        k = trim_count(alpha, n)
        if k == 0:
            return self._total / n
        return (self.prefix_sum(n - k) - self.prefix_sum(k)) / (n - 2 * k)

    def median(self) -> float:
        s = self._sorted
        n = len(s)
        if n == 0:
            raise StateError("no samples recorded")
        h = n // 2
        if n % 2:
            return s[h]
        return 0.5 * (s[h - 1] + s[h])


class SortedArrayStatistics:
    """Reference store: a plain sorted list with O(N) insertion.

    Every query recomputes from scratch; used to cross-check
    :class:`ArmStatistics`.
    """

    def __init__(self, alpha: float = 0.0):
        self.alpha = _check_alpha(alpha)
        self._values = []

    @property
    def count(self) -> int:
        return len(self._values)

    def __len__(self):
        return len(self._values)

    def insert(self, reward: float) -> "SortedArrayStatistics":
        x = float(reward)
        if not math.isfinite(x):
            raise ConfigError(f"reward must be finite, got {reward!r}")
        bisect.insort(self._values, x)
        return self

    def sorted_view(self) -> list:
        return list(self._values)

    def select(self, k: int) -> float:
        return self._values[k]

    def rank(self, x: float) -> int:
        return bisect.bisect_left(self._values, x)

    def prefix_sum(self, k: int) -> float:
        return math.fsum(self._values[:k])

    def mean(self) -> float:
        if not self._values:
            raise StateError("no samples recorded")
        return math.fsum(self._values) / len(self._values)

    def trimmed_mean(self, alpha: Optional[float] = None) -> float:
        alpha = self.alpha if alpha is None else _check_alpha(alpha)
        n = len(self._values)
        if n == 0:
            raise StateError("no samples recorded")
        k = trim_count(alpha, n)
        return math.fsum(self._values[k:n - k]) / (n - 2 * k)

    def median(self) -> float:
        n = len(self._values)
        if n == 0:
            raise StateError("no samples recorded")
        h = n // 2
        return self._values[h] if n % 2 else 0.5 * (self._values[h - 1] + self._values[h])


def insert(stats: ArmStatistics, reward: float) -> ArmStatistics:
    return stats.insert(reward)


def trimmed_mean(stats: ArmStatistics, alpha: float) -> float:
    """Mean of the ``N - 2k`` central samples, ``k = floor(alpha * N)``.

    The denominator is the retained count, so ``alpha = 0`` gives the sample
    mean and trimming is inert while ``N < 1 / alpha``.
    """
    alpha = _check_alpha(alpha)
    return stats.trimmed_mean(alpha)


def empirical_median(stats: ArmStatistics) -> float:
    """Middle order statistic, or the midpoint of the two central ones."""
    return stats.median()


def sample_mean(stats: ArmStatistics) -> float:
    return stats.mean()
