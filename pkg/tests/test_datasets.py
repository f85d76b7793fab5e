import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cbai.datasets import CONTROL_FLOOR, ingest_pkis2, ingest_ratings, pkis2_means, rating_means, read_rows
from cbai.exceptions import AssumptionError, IngestionError


def test_rating_means_example():
    rows = [("A", 3), ("A", 3), ("A", 2), ("B", 1), ("B", 1)]
    ids, means = rating_means(rows)
    assert ids == ["A", "B"]
    assert means == pytest.approx([8 / 3, 1.0])
    inst = ingest_ratings(rows, sigma=0.5)
    assert inst.sigma_proxy == 0.5 and inst.arms[0].params == (pytest.approx(8 / 3), 0.5)


def test_ratings_errors():
    with pytest.raises(IngestionError, match="'B'"):
        rating_means([("A", 1), ("B", "")])
    with pytest.raises(IngestionError):
        rating_means([("A", 1), ("A", 2)])
    with pytest.raises(AssumptionError):
        ingest_ratings([("A", 2), ("B", 2)])
    # no range constraint on ratings
    assert rating_means([("A", 10), ("B", -4)])[1] == [10.0, -4.0]


def test_pkis2_example():
    ids, means = pkis2_means([("x", 0), ("y", 50), ("z", 100)])
    assert means[0] == 0.0
    assert means[1] == pytest.approx(math.log(0.5))
    assert means[2] == pytest.approx(math.log(CONTROL_FLOOR))
    assert means[2] == pytest.approx(-13.8155, abs=1e-4)
    assert ingest_pkis2([("x", 0), ("y", 50), ("z", 100)]).best_arm() == 0


def test_pkis2_errors():
    with pytest.raises(IngestionError):
        pkis2_means([("x", 5), ("y", 5)])
    with pytest.raises(IngestionError):
        pkis2_means([("x", 5), ("x", 7)])
    with pytest.raises(IngestionError):
        pkis2_means([("x", "n/a"), ("y", 3)])


@given(st.lists(st.floats(0, 100), min_size=2, max_size=20, unique=True))
def test_pkis2_order_reversing(values):
    rows = [(f"c{i}", v) for i, v in enumerate(values)]
    _, means = pkis2_means(rows)
    order_in = np.argsort(values, kind="stable")
    m = np.asarray(means)[order_in]
    assert np.all(np.diff(m) <= 0)


def test_read_rows(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("caption,rating\nc1,3\nc1,1\n\nc2,2\n", encoding="utf-8")
    assert read_rows(str(p)) == [("c1", "3"), ("c1", "1"), ("c2", "2")]
    q = tmp_path / "bad.csv"
    q.write_text("only\n", encoding="utf-8")
    with pytest.raises(IngestionError):
        read_rows(str(q))
