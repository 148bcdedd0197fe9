import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from medialhull.errors import EmptyInput, InvalidRatio, ZeroHullAxis
from medialhull.metrics import (RatioReport, categorize, category_counts, medial_hull_ratio,
                                statewide_average)
from medialhull.shapes import random_convex_polygon, rectangle, spiral_district

BIG_STATE = rectangle(4e6, 4e6, -2e6, -2e6)


def report(ratio, sid="01"):
    return RatioReport("42", sid, ratio, 1.0, ratio, categorize(ratio))


@pytest.mark.parametrize("ratio, cat", [(2.47, 3), (2.00, 2), (2.40, 3), (2.80, 4), (1.0, 1),
                                        (1.99, 1), (2.39, 2), (2.79, 3), (0.5, 1), (10.0, 4)])
def test_categorize(ratio, cat):
    assert categorize(ratio) == cat


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_categorize_rejects_non_finite(bad):
    with pytest.raises(InvalidRatio):
        categorize(bad)


@given(st.floats(1e-6, 100), st.floats(1e-6, 100))
def test_categorize_monotone(a, b):
    lo, hi = sorted((a, b))
    assert 1 <= categorize(lo) <= categorize(hi) <= 4


def test_statewide_average():
    assert statewide_average([report(1.7)]) == (1.7, 1)
    assert statewide_average([report(1.0, "01"), report(3.0, "02")]) == (2.0, 2)
    with pytest.raises(EmptyInput):
        statewide_average([])


def test_statewide_average_order_independent(rng):
    reps = [report(float(r), f"{i:02d}") for i, r in enumerate(rng.uniform(0.8, 3.5, 18))]
    a = statewide_average(reps)
    b = statewide_average(reps[::-1])
    assert a == b


def test_category_counts():
    reps = [report(1.0, "01"), report(3.0, "02"), report(2.5, "03"), report(2.9, "04")]
    assert category_counts(reps) == {1: 1, 2: 0, 3: 1, 4: 2}


def test_convex_district_ratio_exactly_one(rng):
    poly = random_convex_polygon(rng, 25, 30_000)
    r = medial_hull_ratio(poly, BIG_STATE, state_fips="42", district_id="07")
    assert r.ratio == 1.0 and r.category == 1
    assert r.medial_length == r.hull_length > 0
    assert (r.state_fips, r.district_id) == ("42", "07")


def test_rectangle_ratio_one():
    r = medial_hull_ratio(rectangle(40_000, 10_000), BIG_STATE)
    assert r.ratio == pytest.approx(1.0, abs=1e-6)


def test_spiral_is_category_four():
    r = medial_hull_ratio(spiral_district(), BIG_STATE)
    assert r.ratio > 2.8 and r.category == 4


def test_report_consistency():
    r = medial_hull_ratio(spiral_district(), BIG_STATE)
    assert r.ratio * r.hull_length == pytest.approx(r.medial_length, rel=1e-9)
    assert r.medial_length >= 0 and r.hull_length >= 0


def test_zero_hull_axis_is_an_error():
    with pytest.raises(ZeroHullAxis):
        medial_hull_ratio(rectangle(50_000, 300), BIG_STATE)
