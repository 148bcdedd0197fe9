"""Handley's meanderingness measure.

From each seed point, rays are cast around the compass at a fixed angular
step; the nearest boundary hit along each ray becomes a vertex of the
seed's coverage polygon.  The measure is the largest coverage area over
the sampled seeds, as a fraction of the district area.  Higher values mean
*less* meandering.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoValidSeeds, SeedOutsideDistrict
from .geometry import (
    MultiPolygon,
    boundary_segments,
    centroid,
    points_in_polygon,
    points_on_boundary,
    signed_area,
)

log = logging.getLogger(__name__)

__all__ = ["SeedSampling", "SeedResult", "MeanderReport", "coverage_polygon",
           "meanderingness", "DEFAULT_GRID_SEEDS"]

DEFAULT_GRID_SEEDS = 100


@dataclass(frozen=True)
class SeedSampling:
    """How seed points are drawn from a district.

    ``grid``: a square lattice with the given spacing (``None`` picks a
    spacing that yields about 100 interior seeds) plus each part's centroid.
    ``provided``: explicit points.  ``every_nth``: every ``n``-th point of an
    ordered list, starting with the first.
    """

    strategy: str = "grid"
    spacing: float | None = None
    points: np.ndarray | None = field(default=None, compare=False)
    n: int = 1

    def __post_init__(self):
        if self.strategy not in ("grid", "provided", "every_nth"):
            raise ValueError(f"unknown seed strategy {self.strategy!r}")
        if self.strategy == "grid" and self.spacing is not None and not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if self.strategy != "grid" and self.points is None:
            raise ValueError(f"{self.strategy} sampling needs points")
        if self.n < 1:
            raise ValueError("n must be at least 1")

    @classmethod
    def grid(cls, spacing: float | None = None) -> "SeedSampling":
        return cls("grid", spacing=spacing)

    @classmethod
    def provided(cls, points) -> "SeedSampling":
        return cls("provided", points=np.asarray(points, float).reshape(-1, 2))

    @classmethod
    def every_nth(cls, points, n: int) -> "SeedSampling":
        return cls("every_nth", points=np.asarray(points, float).reshape(-1, 2), n=n)

    def seeds(self, district) -> np.ndarray:
        mp = MultiPolygon.of(district)
        if self.strategy == "provided":
            return np.asarray(self.points, float).reshape(-1, 2)
        if self.strategy == "every_nth":
            return np.asarray(self.points, float).reshape(-1, 2)[::self.n]
        x0, y0, x1, y1 = mp.bounds
        spacing = self.spacing
        if spacing is None:
            spacing = math.sqrt(mp.area / DEFAULT_GRID_SEEDS)
        xs = np.arange(x0 + spacing / 2, x1, spacing)
        ys = np.arange(y0 + spacing / 2, y1, spacing)
        gx, gy = np.meshgrid(xs, ys)
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        centers = np.array([centroid(p) for p in mp.parts])
        pts = np.vstack([centers, grid])
        return pts[_strictly_inside(pts, mp)]


@dataclass(frozen=True)
class SeedResult:
    seed: tuple[float, float]
    coverage_area: float
    ratio: float


@dataclass(frozen=True)
class MeanderReport:
    mu: float
    seed_results: list

    @property
    def best(self) -> SeedResult:
        return max(self.seed_results, key=lambda r: r.ratio)


def _strictly_inside(points, mp: MultiPolygon) -> np.ndarray:
    pts = np.asarray(points, float).reshape(-1, 2)
    return points_in_polygon(pts, mp) & ~points_on_boundary(pts, mp)


def _check_step(step_degrees: float) -> int:
    if not step_degrees > 0:
        raise ValueError("step must be positive")
    count = 360.0 / step_degrees
    if abs(count - round(count)) > 1e-9:
        raise ValueError(f"360 is not divisible by step {step_degrees:g}")
    return int(round(count))


def _ray_hits(seed, directions, edges) -> np.ndarray:
    """Nearest boundary point along each ray from ``seed``."""
    p = np.asarray(seed, float)
    r = directions[:, None, :]
    q = edges[None, :, 0, :]
    s = (edges[:, 1] - edges[:, 0])[None, :, :]
    qp = q - p
    denom = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / denom
        u = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / denom
    # slack on u so a ray through a vertex is not lost to rounding on both edges
    eps = 1e-12
    hit = (denom != 0) & (u >= -eps) & (u <= 1 + eps) & (t > 0) & (t <= 1)
    t = np.where(hit, t, np.inf)
    # A ray running along an edge meets it first at the nearer endpoint.
    coll = (denom == 0) & (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0] == 0)
    if coll.any():
        rr = np.einsum("...i,...i->...", r, r)
        t0 = np.einsum("...i,...i->...", qp, r) / rr
        t1 = np.einsum("...i,...i->...", qp + s, r) / rr
        lo = np.minimum(t0, t1)
        hi = np.maximum(t0, t1)
        tc = np.where(lo > 0, lo, np.where(hi > 0, 0.0, np.inf))
        t = np.where(coll, np.minimum(t, tc), t)
    best = t.min(axis=1)
    return p + best[:, None] * directions


def coverage_polygon(seed, district, step_degrees: float = 5.0,
                     start_bearing: float = 0.0) -> np.ndarray:
    """Coverage polygon of ``seed`` as an ``(n, 2)`` ring ordered by bearing.

    Bearings are degrees clockwise from north, so the ring winds clockwise.
    """
    count = _check_step(step_degrees)
    mp = MultiPolygon.of(district)
    if not _strictly_inside([seed], mp)[0]:
        raise SeedOutsideDistrict(f"seed {tuple(seed)} is not strictly inside the district")
    x0, y0, x1, y1 = mp.bounds
    reach = 2.0 * math.hypot(x1 - x0, y1 - y0)
    bearings = np.radians(start_bearing + step_degrees * np.arange(count))
    directions = reach * np.column_stack([np.sin(bearings), np.cos(bearings)])
    return _ray_hits(seed, directions, boundary_segments(mp))


def meanderingness(district, sampling: SeedSampling = SeedSampling(),
                   step_degrees: float = 5.0) -> MeanderReport:
    """Largest coverage-polygon area over the sampled seeds, relative to the
    district's total area."""
    _check_step(step_degrees)
    mp = MultiPolygon.of(district)
    area = mp.area
    seeds = sampling.seeds(mp)
    results = []
    for seed in seeds:
        try:
            ring = coverage_polygon(seed, mp, step_degrees)
        except SeedOutsideDistrict:
            log.info("skipping seed %s outside the district", tuple(seed))
            continue
        cov = abs(signed_area(ring))
        results.append(SeedResult((float(seed[0]), float(seed[1])), cov, cov / area))
    if not results:
        raise NoValidSeeds("no seed lies strictly inside the district")
    return MeanderReport(max(r.ratio for r in results), results)
