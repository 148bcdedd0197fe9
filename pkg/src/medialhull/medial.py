"""Approximate medial axes from point-sampled Voronoi diagrams.

For every polygon part the boundary rings are simplified, densified and
turned into point sites.  Voronoi edges that come within ``buffer`` meters
of the original boundary are dropped whole, the rest are clipped to the
part.  The hull axis runs the same pipeline on the district's convex hull
after clipping it to the state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateInput, EmptyIntersection
from .geometry import (
    MultiPolygon,
    Polygon,
    SegmentSet,
    boundary_segments,
    canonical_ring,
    clip_polygon_to_convex,
    convex_hull,
    densify_ring,
    points_in_polygon,
    segment_distance,
    simplify_ring,
)
from .voronoi import merge_duplicate_sites, voronoi_edges

log = logging.getLogger(__name__)

__all__ = ["PipelineParams", "approximate_medial_axis", "hull_axis",
           "clipped_hull", "axis_length"]


@dataclass(frozen=True)
class PipelineParams:
    buffer: float = 200.0
    simplify_tolerance: float = 500.0
    densify_k: int = 10
    sentinel_margin_factor: float = 10.0
    fragment_length_cap_factor: float = 2.0

    def __post_init__(self):
        if not self.buffer > 0:
            raise ValueError("buffer must be positive")
        if self.simplify_tolerance < 0:
            raise ValueError("simplify_tolerance must be non-negative")
        if self.densify_k < 0 or int(self.densify_k) != self.densify_k:
            raise ValueError("densify_k must be a non-negative integer")
        if not (self.sentinel_margin_factor > 0 and self.fragment_length_cap_factor > 0):
            raise ValueError("factors must be positive")

    def scaled(self, s: float) -> "PipelineParams":
        """Multiply every length parameter by ``s`` (factors are relative)."""
        return replace(self, buffer=self.buffer * s,
                       simplify_tolerance=self.simplify_tolerance * s)


def _sample_ring(ring, params: PipelineParams) -> np.ndarray:
    ring = canonical_ring(ring)
    return densify_ring(simplify_ring(ring, params.simplify_tolerance), params.densify_k)


def _far_from_boundary(segs: np.ndarray, edges: np.ndarray, buffer: float) -> np.ndarray:
    """Mask of segments whose distance to every boundary edge exceeds ``buffer``."""
    if not len(segs):
        return np.zeros(0, dtype=bool)
    # Index the boundary by short pieces so a radius query bounds the search.
    piece = buffer
    lens = np.hypot(*(edges[:, 1] - edges[:, 0]).T)
    counts = np.maximum(1, np.ceil(lens / piece).astype(int))
    owner = np.repeat(np.arange(len(edges)), counts)
    offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    t0 = (offs / counts[owner])[:, None]
    t1 = ((offs + 1) / counts[owner])[:, None]
    a, b = edges[owner, 0], edges[owner, 1]
    pa = a + t0 * (b - a)
    pb = a + t1 * (b - a)
    half_piece = float(np.hypot(*(pb - pa).T).max()) / 2
    tree = cKDTree((pa + pb) / 2)

    mids = segs.mean(axis=1)
    half = np.hypot(*(segs[:, 1] - segs[:, 0]).T) / 2
    radius = buffer + half + half_piece
    keep = np.ones(len(segs), dtype=bool)
    cand = tree.query_ball_point(mids, radius)
    seg_idx = np.repeat(np.arange(len(segs)), [len(c) for c in cand])
    if not len(seg_idx):
        return keep
    piece_idx = np.fromiter((j for c in cand for j in c), dtype=np.int64, count=len(seg_idx))
    step = 1 << 20
    for s in range(0, len(seg_idx), step):
        si = seg_idx[s:s + step]
        pj = piece_idx[s:s + step]
        d = segment_distance(segs[si, 0], segs[si, 1], pa[pj], pb[pj])
        close = d <= buffer
        keep[si[close]] = False
    return keep


def _part_axis(part: Polygon, params: PipelineParams) -> SegmentSet:
    sites = np.vstack([_sample_ring(r, params) for r in part.rings])
    sites = merge_duplicate_sites(sites)
    if len(sites) < 3:
        return SegmentSet.empty()
    x0, y0, x1, y1 = part.bounds
    diag = float(np.hypot(x1 - x0, y1 - y0))
    try:
        vd = voronoi_edges(sites, (x0, y0, x1, y1),
                           sentinel_margin=params.sentinel_margin_factor * diag)
    except DegenerateInput:
        return SegmentSet.empty()
    segs = vd.segments
    # Atomic keep/drop: the midpoint test suffices for interiority because a
    # surviving edge never comes within ``buffer`` of the boundary, so it
    # cannot cross it.  Clipping to the part is then the identity.
    inside = points_in_polygon(segs.midpoints, part)
    segs = segs.subset(inside)
    far = _far_from_boundary(segs.segments, boundary_segments(part), params.buffer)
    segs = segs.subset(far)
    cap = params.fragment_length_cap_factor * diag
    ok = (segs.lengths <= cap) & (segs.lengths > 0)
    if not ok.all():
        log.warning("dropping %d axis fragment(s) longer than %.0f m", int((~ok).sum()), cap)
    return segs.subset(ok)


def approximate_medial_axis(region, params: PipelineParams = PipelineParams()) -> SegmentSet:
    """Approximate medial axis of a polygon or multipolygon.

    Each part is handled by its own Voronoi computation; hole rings are
    sampled along with the outer ring.  Returns an empty set when the region
    is thinner than ``2 * buffer`` everywhere.
    """
    mp = MultiPolygon.of(region)
    return SegmentSet.concat(_part_axis(p, params) for p in mp.parts)


def clipped_hull(district, state) -> MultiPolygon:
    """Convex hull of all district vertices, intersected with the state."""
    d = MultiPolygon.of(district)
    hull = convex_hull(d.outer_vertices())
    if state is None:
        return MultiPolygon((Polygon(hull),))
    clipped = clip_polygon_to_convex(MultiPolygon.of(state), hull)
    if clipped.is_empty:
        raise EmptyIntersection("convex hull of the district misses the state entirely")
    if clipped.area < d.area * (1 - 1e-6):
        log.warning("district is not contained in its state (%.1f%% of district area outside)",
                    100 * (1 - clipped.area / d.area))
    return clipped


def hull_axis(district, state, params: PipelineParams = PipelineParams()) -> SegmentSet:
    """Medial axis of the district's convex hull clipped to ``state``."""
    return approximate_medial_axis(clipped_hull(district, state), params)


def axis_length(axis: SegmentSet) -> float:
    return axis.length
