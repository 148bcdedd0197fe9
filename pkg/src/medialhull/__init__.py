"""Medial-hull ratio and Handley meanderingness for district polygons."""

from .errors import *  # noqa: F401,F403
from .geometry import MultiPolygon, Polygon, SegmentSet
from .handley import MeanderReport, SeedSampling, coverage_polygon, meanderingness
from .medial import PipelineParams, approximate_medial_axis, clipped_hull, hull_axis
from .metrics import (RatioReport, categorize, category_counts, medial_hull_ratio,
                      statewide_average)
from .voronoi import delaunay, voronoi_edges

__version__ = "0.1.0"

__all__ = ["Polygon", "MultiPolygon", "SegmentSet", "PipelineParams",
           "approximate_medial_axis", "hull_axis", "clipped_hull", "RatioReport",
           "categorize", "medial_hull_ratio", "statewide_average", "category_counts",
           "SeedSampling", "MeanderReport", "coverage_polygon", "meanderingness",
           "delaunay", "voronoi_edges"]
