"""Medial-hull ratio, evidence categories and statewide averages."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInput, InvalidRatio, ZeroHullAxis
from .medial import PipelineParams, approximate_medial_axis, hull_axis

__all__ = ["RatioReport", "CATEGORY_THRESHOLDS", "categorize", "medial_hull_ratio",
           "statewide_average", "category_counts"]

# Lower bounds (inclusive) of categories 2, 3 and 4.
CATEGORY_THRESHOLDS = (2.00, 2.40, 2.80)


@dataclass(frozen=True)
class RatioReport:
    state_fips: str
    district_id: str
    medial_length: float
    hull_length: float
    ratio: float
    category: int


def categorize(ratio: float) -> int:
    """Map a medial-hull ratio to evidence category 1-4.

    >>> [categorize(r) for r in (1.99, 2.00, 2.39, 2.40, 2.79, 2.80)]
    [1, 2, 2, 3, 3, 4]
    """
    if not math.isfinite(ratio):
        raise InvalidRatio(f"ratio must be finite, got {ratio!r}")
    return 1 + sum(ratio >= t for t in CATEGORY_THRESHOLDS)


def medial_hull_ratio(district, state, params: PipelineParams = PipelineParams(),
                      state_fips: str = "", district_id: str = "") -> RatioReport:
    medial = approximate_medial_axis(district, params).length
    hull = hull_axis(district, state, params).length
    if hull <= 0:
        raise ZeroHullAxis(
            f"hull axis of district {district_id or '?'} is empty "
            f"(hull thinner than {2 * params.buffer:g} m everywhere)")
    ratio = medial / hull
    return RatioReport(state_fips, district_id, medial, hull, ratio, categorize(ratio))


def statewide_average(reports: Sequence[RatioReport]) -> tuple[float, int]:
    """Unweighted mean ratio over districts and the category of that mean."""
    if not reports:
        raise EmptyInput("no reports to average")
    ordered = sorted(reports, key=lambda r: (r.state_fips, r.district_id))
    mean = math.fsum(r.ratio for r in ordered) / len(ordered)
    return mean, categorize(mean)


def category_counts(reports: Sequence[RatioReport]) -> dict[int, int]:
    counts = {c: 0 for c in (1, 2, 3, 4)}
    for r in reports:
        counts[r.category] += 1
    return counts
