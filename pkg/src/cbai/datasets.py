"""Turn pre-downloaded dataset exports into Gaussian bandit instances.

Two layouts are supported, both as two-column CSV rows:

* ratings ``(item_id, rating)``: one arm per item, mean = average rating
  (e.g. a caption-contest export with ratings in {1, 2, 3}).
* inhibition ``(compound_id, percent_inhibition)``: values are min-max
  normalised over the file, converted to ``control = 1 - normalised`` and the
  arm mean is ``ln(max(control, 1e-6))``.
"""

from __future__ import annotations

import csv
import math
from typing import Iterable, List, Sequence, Tuple

from .bandit import ArmDistribution, BanditInstance
from .exceptions import IngestionError

__all__ = ["ingest_ratings", "ingest_pkis2", "rating_means", "pkis2_means", "read_rows", "CONTROL_FLOOR"]

#: Smallest percentage control passed to the logarithm.
CONTROL_FLOOR = 1e-6


def read_rows(path: str) -> List[Tuple[str, str]]:
    """Read two-column rows from a CSV file, dropping a header row if present."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    out = []
    for n, r in enumerate(rows):
        if len(r) < 2:
            raise IngestionError(f"{path}:{n + 1}: expected two columns, got {r!r}")
        out.append((r[0].strip(), r[1].strip()))
    if out and not _is_number(out[0][1]):
        out = out[1:]
    return out


def _is_number(text) -> bool:
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def _grouped(rows: Iterable[Sequence], what: str):
    groups = {}
    for row in rows:
        key, value = str(row[0]), row[1]
        bucket = groups.setdefault(key, [])
        if value is None or (isinstance(value, str) and not value.strip()):
            continue
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise IngestionError(f"{what} for {key!r} is not a number: {value!r}") from None
        if not math.isfinite(v):
            raise IngestionError(f"{what} for {key!r} is not finite: {value!r}")
        bucket.append(v)
    for key, values in groups.items():
        if not values:
            raise IngestionError(f"item {key!r} has no {what} values")
    return groups


def rating_means(rows: Iterable[Sequence]):
    """``(item_ids, means)`` in order of first appearance."""
    groups = _grouped(rows, "rating")
    if len(groups) < 2:
        raise IngestionError(f"need at least 2 items, found {len(groups)}")
    ids = list(groups)
    return ids, [math.fsum(groups[k]) / len(groups[k]) for k in ids]


def ingest_ratings(rows: Iterable[Sequence], sigma: float = 1.0) -> BanditInstance:
    """Gaussian arm per item with the item's mean rating and standard deviation ``sigma``."""
    _, means = rating_means(rows)
    return BanditInstance(tuple(ArmDistribution.gaussian(m, sigma) for m in means), sigma)


def pkis2_means(rows: Iterable[Sequence]):
    """``(compound_ids, log_control_means)``; repeated compounds are averaged first."""
    groups = _grouped(rows, "percent inhibition")
    if len(groups) < 2:
        raise IngestionError(f"need at least 2 compounds, found {len(groups)}")
    ids = list(groups)
    inhibition = [math.fsum(groups[k]) / len(groups[k]) for k in ids]
    lo, hi = min(inhibition), max(inhibition)
    if hi == lo:
        raise IngestionError("percent inhibition is constant across compounds; min-max normalisation is undefined")
    means = []
    for v in inhibition:
        control = 1.0 - (v - lo) / (hi - lo)
        means.append(math.log(max(control, CONTROL_FLOOR)))
    return ids, means


def ingest_pkis2(rows: Iterable[Sequence], sigma: float = 1.0) -> BanditInstance:
    """Gaussian arm per compound with mean log percentage control."""
    _, means = pkis2_means(rows)
    return BanditInstance(tuple(ArmDistribution.gaussian(m, sigma) for m in means), sigma)
