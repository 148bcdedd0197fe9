"""Planar primitives in projected meters.

Rings and polylines are plain ``(n, 2)`` float arrays.  A ring is closed
implicitly: its last vertex connects back to the first.  Orientation and
in-circle predicates are exact (floating-point filter with a rational
fallback), everything else is ordinary floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInput

__all__ = [
    "Polygon",
    "MultiPolygon",
    "SegmentSet",
    "orient2d",
    "incircle",
    "signed_area",
    "convex_hull",
    "is_reflex",
    "simplify_dp",
    "simplify_ring",
    "densify_count",
    "densify_ring",
    "point_in_polygon",
    "points_in_polygon",
    "clip_polygon_to_convex",
    "clip_segments_to_polygon",
    "segment_distance",
    "min_distance_segment_to_boundary",
    "canonical_ring",
    "centroid",
]

_EPS = np.finfo(float).eps / 2
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS

# Working-set cap (pairs) for the chunked all-pairs kernels.
_CHUNK = 1 << 21


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _orient_exact(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (*a, *b, *c))
    return _sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def orient2d(a, b, c) -> int:
    """Exact sign of the turn ``a -> b -> c``: +1 left, -1 right, 0 collinear."""
    detleft = (b[0] - a[0]) * (c[1] - a[1])
    detright = (b[1] - a[1]) * (c[0] - a[0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _orient_exact(a, b, c)


def orient2d_many(a, b, c) -> np.ndarray:
    """Vectorized :func:`orient2d` over broadcastable ``(..., 2)`` arrays."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float),
                                  np.asarray(c, float))
    detleft = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
    detright = (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    out = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= bound
    if unsure.any():
        for idx in zip(*np.nonzero(unsure)):
            out[idx] = _orient_exact(a[idx], b[idx], c[idx])
    return out


def _incircle_exact(a, b, c, d) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = (Fraction(float(v)) for v in (*a, *b, *c, *d))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return _sign(det)


def incircle(a, b, c, d) -> int:
    """+1 if ``d`` lies strictly inside the circle through CCW ``a, b, c``.

    Returns -1 outside and 0 when the four points are cocircular.
    """
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = ((abs(bdx * cdy) + abs(cdx * bdy)) * alift
                 + (abs(cdx * ady) + abs(adx * cdy)) * blift
                 + (abs(adx * bdy) + abs(bdx * ady)) * clift)
    bound = _ICC_ERRBOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return _incircle_exact(a, b, c, d)


def incircle_many(a, b, c, d) -> np.ndarray:
    """Vectorized :func:`incircle`."""
    a, b, c, d = (np.asarray(v, float) for v in (a, b, c, d))
    ad, bd, cd = a - d, b - d, c - d
    adx, ady = ad[..., 0], ad[..., 1]
    bdx, bdy = bd[..., 0], bd[..., 1]
    cdx, cdy = cd[..., 0], cd[..., 1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    permanent = ((np.abs(bdx * cdy) + np.abs(cdx * bdy)) * alift
                 + (np.abs(cdx * ady) + np.abs(adx * cdy)) * blift
                 + (np.abs(adx * bdy) + np.abs(bdx * ady)) * clift)
    out = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= _ICC_ERRBOUND * permanent
    for idx in zip(*np.nonzero(unsure)):
        out[idx] = _incircle_exact(a[idx], b[idx], c[idx], d[idx])
    return out


# ---------------------------------------------------------------------------
# Geometry containers
# ---------------------------------------------------------------------------

def _as_ring(points) -> np.ndarray:
    ring = np.array(points, dtype=float).reshape(-1, 2)
    if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
        ring = ring[:-1]
    if len(ring):
        keep = np.ones(len(ring), dtype=bool)
        keep[1:] = np.any(ring[1:] != ring[:-1], axis=1)
        ring = ring[keep]
        if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
            ring = ring[:-1]
    if not np.all(np.isfinite(ring)):
        raise ValueError("ring coordinates must be finite")
    ring.flags.writeable = False
    return ring


def _oriented(ring: np.ndarray, ccw: bool) -> np.ndarray:
    if (signed_area(ring) > 0) != ccw:
        ring = ring[::-1].copy()
        ring.flags.writeable = False
    return ring


@dataclass(frozen=True, eq=False)
class Polygon:
    """A polygon with a counterclockwise outer ring and clockwise holes.

    Orientation is normalized on construction, so callers may pass rings
    wound either way.  A trailing vertex equal to the first is dropped.
    """

    outer: np.ndarray
    holes: tuple = ()

    def __post_init__(self):
        outer = _oriented(_as_ring(self.outer), ccw=True)
        if len(outer) < 3:
            raise DegenerateInput("a ring needs at least 3 distinct vertices")
        holes = tuple(_oriented(_as_ring(h), ccw=False) for h in self.holes)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", holes)

    @property
    def rings(self) -> list[np.ndarray]:
        return [self.outer, *self.holes]

    @property
    def area(self) -> float:
        return sum(signed_area(r) for r in self.rings)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        lo = self.outer.min(axis=0)
        hi = self.outer.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def transformed(self, fn) -> "Polygon":
        """Apply ``fn`` to every ``(n, 2)`` coordinate array."""
        return Polygon(fn(self.outer), tuple(fn(h) for h in self.holes))


@dataclass(frozen=True, eq=False)
class MultiPolygon:
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @classmethod
    def of(cls, geom) -> "MultiPolygon":
        """Coerce a Polygon, MultiPolygon or bare ring into a MultiPolygon."""
        if isinstance(geom, MultiPolygon):
            return geom
        if isinstance(geom, Polygon):
            return cls((geom,))
        return cls((Polygon(geom),))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def area(self) -> float:
        return sum(p.area for p in self.parts)

    @property
    def rings(self) -> list[np.ndarray]:
        return [r for p in self.parts for r in p.rings]

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        pts = np.vstack([p.outer for p in self.parts])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    def outer_vertices(self) -> np.ndarray:
        return np.vstack([p.outer for p in self.parts])

    def transformed(self, fn) -> "MultiPolygon":
        return MultiPolygon(tuple(p.transformed(fn) for p in self.parts))


@dataclass(frozen=True, eq=False)
class SegmentSet:
    """A bag of straight segments, shape ``(n, 2, 2)``.

    ``sites`` optionally records, per segment, the indices of the two
    Voronoi sites whose bisector produced it.
    """

    segments: np.ndarray
    sites: np.ndarray | None = None

    def __post_init__(self):
        segs = np.array(self.segments, dtype=float).reshape(-1, 2, 2)
        segs.flags.writeable = False
        object.__setattr__(self, "segments", segs)
        if self.sites is not None:
            sites = np.array(self.sites, dtype=np.int64).reshape(-1, 2)
            if len(sites) != len(segs):
                raise ValueError("sites must align with segments")
            sites.flags.writeable = False
            object.__setattr__(self, "sites", sites)

    @classmethod
    def empty(cls) -> "SegmentSet":
        return cls(np.empty((0, 2, 2)), np.empty((0, 2), dtype=np.int64))

    def __len__(self):
        return len(self.segments)

    @property
    def lengths(self) -> np.ndarray:
        d = self.segments[:, 1] - self.segments[:, 0]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def length(self) -> float:
        return float(self.lengths.sum())

    @property
    def midpoints(self) -> np.ndarray:
        return self.segments.mean(axis=1)

    def subset(self, mask) -> "SegmentSet":
        sites = None if self.sites is None else self.sites[mask]
        return SegmentSet(self.segments[mask], sites)

    @staticmethod
    def concat(sets: Iterable["SegmentSet"]) -> "SegmentSet":
        sets = list(sets)
        if not sets:
            return SegmentSet.empty()
        segs = np.concatenate([s.segments for s in sets])
        if any(s.sites is None for s in sets):
            return SegmentSet(segs)
        return SegmentSet(segs, np.concatenate([s.sites for s in sets]))


# ---------------------------------------------------------------------------
# Rings and polylines
# ---------------------------------------------------------------------------

def signed_area(ring) -> float:
    """Shoelace area: positive for counterclockwise rings."""
    r = np.asarray(ring, dtype=float)
    if len(r) < 3:
        return 0.0
    x = r[:, 0] - r[0, 0]
    y = r[:, 1] - r[0, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def centroid(geom) -> np.ndarray:
    """Area centroid of a (Multi)Polygon, holes subtracted."""
    total, acc = 0.0, np.zeros(2)
    for ring in MultiPolygon.of(geom).rings:
        r = np.asarray(ring, dtype=float)
        o = r[0]
        x, y = (r - o).T
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        a = cross.sum() / 2
        total += a
        acc += a * o + np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / 6
    return acc / total


def canonical_ring(ring) -> np.ndarray:
    """Rotate a ring so it starts at its lexicographically smallest vertex."""
    r = np.asarray(ring, dtype=float)
    start = int(np.lexsort((r[:, 1], r[:, 0]))[0])
    return np.roll(r, -start, axis=0)


def convex_hull(points) -> np.ndarray:
    """Counterclockwise hull ring (monotone chain), collinear points dropped.

    The ring starts at the lexicographically smallest point.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) < 3:
        raise DegenerateInput("convex hull needs at least 3 distinct points")
    pts = [tuple(p) for p in pts]

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and orient2d(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return np.array(hull)


def is_reflex(ring, index: int) -> bool:
    """True iff the interior angle at ``ring[index]`` exceeds pi."""
    r = np.asarray(ring, dtype=float)
    n = len(r)
    turn = orient2d(r[index - 1], r[index], r[(index + 1) % n])
    return turn * (1 if signed_area(r) > 0 else -1) < 0


def _point_segment_distance(p, a, b) -> np.ndarray:
    """Distance from points ``p`` to segments ``a-b`` (broadcasting)."""
    p, a, b = np.broadcast_arrays(np.asarray(p, float), np.asarray(a, float),
                                  np.asarray(b, float))
    ab = b - a
    ap = p - a
    denom = np.einsum("...i,...i->...", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, np.einsum("...i,...i->...", ap, ab) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    d = ap - t[..., None] * ab
    return np.hypot(d[..., 0], d[..., 1])


def simplify_dp(line, tolerance: float) -> np.ndarray:
    """Douglas-Peucker simplification of an open polyline.

    A vertex survives when it lies farther than ``tolerance`` from the chord
    of its current span.  Endpoints are always kept and a zero tolerance
    returns the input unchanged.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    pts = np.asarray(line, dtype=float)
    n = len(pts)
    if tolerance == 0 or n <= 2:
        return pts.copy()
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        d = _point_segment_distance(pts[i + 1:j], pts[i], pts[j])
        k = int(np.argmax(d))
        if d[k] > tolerance:
            k += i + 1
            keep[k] = True
            stack.append((k, j))
            stack.append((i, k))
    return pts[keep]


def simplify_ring(ring, tolerance: float) -> np.ndarray:
    """Douglas-Peucker on a closed ring anchored at its first vertex."""
    r = np.asarray(ring, dtype=float)
    closed = np.vstack([r, r[:1]])
    return simplify_dp(closed, tolerance)[:-1]


def densify_count(line, k: int) -> np.ndarray:
    """Insert ``k`` equally spaced vertices inside every segment."""
    if k < 0:
        raise ValueError("k must be non-negative")
    pts = np.asarray(line, dtype=float)
    if k == 0 or len(pts) < 2:
        return pts.copy()
    j = np.arange(k + 1, dtype=float)[None, :, None]
    a = pts[:-1, None, :]
    b = pts[1:, None, :]
    seg = (a * (k + 1 - j) + b * j) / (k + 1)
    seg[:, 0] = pts[:-1]  # originals bit-exact
    return np.vstack([seg.reshape(-1, 2), pts[-1:]])


def densify_ring(ring, k: int) -> np.ndarray:
    r = np.asarray(ring, dtype=float)
    return densify_count(np.vstack([r, r[:1]]), k)[:-1]


def ring_edges(ring) -> np.ndarray:
    r = np.asarray(ring, dtype=float)
    return np.stack([r, np.roll(r, -1, axis=0)], axis=1)


def boundary_segments(geom) -> np.ndarray:
    """All edges of all rings of a (Multi)Polygon, shape ``(n, 2, 2)``."""
    return np.concatenate([ring_edges(r) for r in MultiPolygon.of(geom).rings])


# ---------------------------------------------------------------------------
# Containment
# ---------------------------------------------------------------------------

def _on_segments(points, edges) -> np.ndarray:
    """Boolean ``(P, E)``: point lies on the closed edge (exact test)."""
    p = points[:, None, :]
    a = edges[None, :, 0, :]
    b = edges[None, :, 1, :]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    in_box = np.all((p >= lo) & (p <= hi), axis=-1)
    if not in_box.any():
        return in_box
    detleft = (b[..., 0] - a[..., 0]) * (p[..., 1] - a[..., 1])
    detright = (b[..., 1] - a[..., 1]) * (p[..., 0] - a[..., 0])
    det = detleft - detright
    bound = _CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    on = in_box & (det == 0)
    unsure = in_box & (det != 0) & (np.abs(det) <= bound)
    for i, j in zip(*np.nonzero(unsure)):
        on[i, j] = _orient_exact(edges[j, 0], edges[j, 1], points[i]) == 0
    return on


def _parity(points, edges) -> np.ndarray:
    """Even-odd crossing parity of a ray cast toward +x, per point."""
    px = points[:, 0:1]
    py = points[:, 1:2]
    ax, ay = edges[None, :, 0, 0], edges[None, :, 0, 1]
    bx, by = edges[None, :, 1, 0], edges[None, :, 1, 1]
    straddle = (ay > py) != (by > py)
    with np.errstate(invalid="ignore", divide="ignore"):
        xcross = ax + (py - ay) * (bx - ax) / (by - ay)
    hits = straddle & (px < xcross)
    return (hits.sum(axis=1) % 2).astype(bool)


def points_in_polygon(points, geom) -> np.ndarray:
    """Vectorized containment; boundary points count as inside."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    mp = MultiPolygon.of(geom)
    out = np.zeros(len(pts), dtype=bool)
    if not len(pts) or mp.is_empty:
        return out
    for part in mp.parts:
        edges = boundary_segments(part)
        step = max(1, _CHUNK // len(edges))
        for s in range(0, len(pts), step):
            chunk = pts[s:s + step]
            res = _parity(chunk, edges)
            res |= _on_segments(chunk, edges).any(axis=1)
            out[s:s + step] |= res
    return out


def points_on_boundary(points, geom) -> np.ndarray:
    """Vectorized exact test for points lying on any ring of ``geom``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    edges = boundary_segments(geom)
    out = np.zeros(len(pts), dtype=bool)
    step = max(1, _CHUNK // len(edges))
    for s in range(0, len(pts), step):
        out[s:s + step] = _on_segments(pts[s:s + step], edges).any(axis=1)
    return out


def point_in_polygon(p, geom) -> bool:
    """Even-odd containment with holes excluded; boundary counts as inside."""
    return bool(points_in_polygon(np.asarray(p, float)[None, :], geom)[0])


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------

def _segments_intersect(p1, p2, q1, q2) -> np.ndarray:
    """Closed segments intersect or touch (exact, vectorized)."""
    o1 = orient2d_many(p1, p2, q1)
    o2 = orient2d_many(p1, p2, q2)
    o3 = orient2d_many(q1, q2, p1)
    o4 = orient2d_many(q1, q2, p2)
    proper = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    collinear = (o1 == 0) & (o2 == 0) & (o3 == 0) & (o4 == 0)
    # Collinear pairs need an overlap check along the shared line.
    if np.any(collinear):
        lo_p = np.minimum(p1, p2)
        hi_p = np.maximum(p1, p2)
        lo_q = np.minimum(q1, q2)
        hi_q = np.maximum(q1, q2)
        overlap = np.all((lo_p <= hi_q) & (lo_q <= hi_p), axis=-1)
        proper = np.where(collinear, overlap, proper)
    return proper


def segment_distance(p1, p2, q1, q2) -> np.ndarray:
    """Elementwise minimum distance between segments ``p1p2`` and ``q1q2``."""
    p1, p2, q1, q2 = np.broadcast_arrays(*(np.asarray(v, float) for v in (p1, p2, q1, q2)))
    d = np.minimum(
        np.minimum(_point_segment_distance(p1, q1, q2), _point_segment_distance(p2, q1, q2)),
        np.minimum(_point_segment_distance(q1, p1, p2), _point_segment_distance(q2, p1, p2)),
    )
    return np.where(_segments_intersect(p1, p2, q1, q2), 0.0, d)


def min_distance_segment_to_boundary(seg, boundary: Sequence) -> float:
    """Exact minimum distance from one segment to a set of polylines."""
    seg = np.asarray(seg, dtype=float).reshape(2, 2)
    edges = []
    for line in boundary:
        line = np.asarray(line, dtype=float)
        if len(line) == 1:
            edges.append(np.stack([line, line], axis=1))
        else:
            edges.append(np.stack([line[:-1], line[1:]], axis=1))
    if not edges:
        raise ValueError("boundary must be non-empty")
    e = np.concatenate(edges)
    return float(segment_distance(seg[0], seg[1], e[:, 0], e[:, 1]).min())


# ---------------------------------------------------------------------------
# Clipping
# ---------------------------------------------------------------------------

def clip_segments_to_polygon(segs: SegmentSet, geom) -> SegmentSet:
    """Keep the portions of each segment lying inside ``geom``.

    Every segment is split at its crossings with the boundary and a piece
    is kept when its midpoint is inside (boundary counts as inside).
    Adjacent kept pieces are merged back together.
    """
    mp = MultiPolygon.of(geom)
    if not len(segs) or mp.is_empty:
        return SegmentSet.empty() if segs.sites is not None else SegmentSet(np.empty((0, 2, 2)))
    edges = boundary_segments(mp)
    S = segs.segments
    p = S[:, None, 0, :]
    r = (S[:, 1] - S[:, 0])[:, None, :]
    q = edges[None, :, 0, :]
    s = (edges[:, 1] - edges[:, 0])[None, :, :]
    out_segs, out_sites = [], []
    step = max(1, _CHUNK // len(edges))
    for c0 in range(0, len(S), step):
        sl = slice(c0, c0 + step)
        rc, pc = r[sl], p[sl]
        qp = q - pc
        denom = rc[..., 0] * s[..., 1] - rc[..., 1] * s[..., 0]
        with np.errstate(invalid="ignore", divide="ignore"):
            t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / denom
            u = (qp[..., 0] * rc[..., 1] - qp[..., 1] * rc[..., 0]) / denom
        hit = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        # Collinear overlaps contribute the projections of the edge endpoints.
        rr = np.einsum("...i,...i->...", rc, rc)
        coll = (denom == 0) & (qp[..., 0] * rc[..., 1] - qp[..., 1] * rc[..., 0] == 0)
        with np.errstate(invalid="ignore", divide="ignore"):
            t0 = np.einsum("...i,...i->...", qp, rc) / rr
            t1 = np.einsum("...i,...i->...", qp + s, rc) / rr
        for i in range(len(rc)):
            ts = [0.0, 1.0]
            ts.extend(t[i, hit[i]].tolist())
            ts.extend(np.clip(t0[i, coll[i]], 0, 1).tolist())
            ts.extend(np.clip(t1[i, coll[i]], 0, 1).tolist())
            ts = np.unique(np.clip(ts, 0.0, 1.0))
            a, b = S[c0 + i]
            mids = a + ((ts[:-1] + ts[1:]) / 2)[:, None] * (b - a)
            inside = points_in_polygon(mids, mp)
            start = None
            for k, keep in enumerate(inside):
                if keep and start is None:
                    start = ts[k]
                if start is not None and (not keep or k == len(inside) - 1):
                    end = ts[k + 1] if keep else ts[k]
                    if end > start:
                        pa = a if start == 0 else a + start * (b - a)
                        pb = b if end == 1 else a + end * (b - a)
                        out_segs.append((pa, pb))
                        if segs.sites is not None:
                            out_sites.append(segs.sites[c0 + i])
                    start = None
    if segs.sites is None:
        return SegmentSet(np.array(out_segs).reshape(-1, 2, 2))
    return SegmentSet(np.array(out_segs).reshape(-1, 2, 2),
                      np.array(out_sites, dtype=np.int64).reshape(-1, 2))


def _segment_enters_convex(p, q, ring) -> bool:
    """Does the open convex region bounded by CCW ``ring`` meet segment pq?"""
    lo, hi = 0.0, 1.0
    n = len(ring)
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        sp_sign = orient2d(a, b, p)
        sq_sign = orient2d(a, b, q)
        if sp_sign <= 0 and sq_sign <= 0:
            return False
        if sp_sign > 0 and sq_sign > 0:
            continue
        ex, ey = b[0] - a[0], b[1] - a[1]
        sp = ex * (p[1] - a[1]) - ey * (p[0] - a[0])
        sq = ex * (q[1] - a[1]) - ey * (q[0] - a[0])
        t = 0.0 if sp_sign == 0 else (1.0 if sq_sign == 0 else sp / (sp - sq))
        if sp_sign > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
        if lo >= hi:
            return False
    return lo < hi


def _ring_interior_point(ring) -> np.ndarray:
    return np.asarray(ring, float).mean(axis=0)


def _drop_spikes(ring: list) -> list:
    """Remove repeated vertices and zero-width back-tracking spikes."""
    pts = [tuple(p) for p in ring]
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        out = []
        for p in pts:
            if out and out[-1] == p:
                changed = True
                continue
            out.append(p)
        while len(out) > 1 and out[0] == out[-1]:
            out.pop()
            changed = True
        pts = out
        n = len(pts)
        if n < 3:
            break
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if orient2d(a, b, c) == 0:
                dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1])
                if dot <= 0:
                    del pts[i]
                    changed = True
                    break
    return pts


def _clip_rings_halfplane(rings: list, a, b) -> list:
    """Intersect a set of consistently oriented rings with the closed half-plane
    left of the directed line ``a -> b``.

    Inside vertices are kept verbatim; runs that leave and re-enter the
    half-plane are reconnected along the line.  Vertices lying exactly on the
    line are resolved as if the line were pushed outward by an infinitesimal
    amount, which orders coincident crossings consistently.
    """
    a = np.asarray(a, float)
    d = np.asarray(b, float) - a
    dn = d / np.hypot(*d)
    kept: list = []
    chains: list = []
    events: list = []  # (t, key, is_exit, chain index)

    def sd(v):
        return dn[0] * (v[1] - a[1]) - dn[1] * (v[0] - a[0])

    def along(v):
        return (v[0] - a[0]) * dn[0] + (v[1] - a[1]) * dn[1]

    for ring in rings:
        ring = np.asarray(ring, float)
        n = len(ring)
        side = orient2d_many(a, a + d, ring)
        inside = side >= 0
        if inside.all():
            kept.append([tuple(p) for p in ring])
            continue
        if not inside.any():
            continue
        start = int(np.argmin(inside))  # an outside vertex
        current = None
        for step in range(n):
            i = (start + step) % n
            j = (i + 1) % n
            vi, vj = ring[i], ring[j]
            if inside[i]:
                current.append(tuple(vi))
            if inside[i] and not inside[j]:
                if side[i] == 0:
                    pt, key = tuple(vi), float((vj - vi) @ dn) / abs(sd(vj))
                else:
                    si, sj = sd(vi), sd(vj)
                    pt = tuple(vi + (si / (si - sj)) * (vj - vi))
                    current.append(pt)
                    key = 0.0
                events.append((along(pt), key, True, len(chains)))
                chains.append(current)
                current = None
            elif not inside[i] and inside[j]:
                if side[j] == 0:
                    pt, key = tuple(vj), float((vi - vj) @ dn) / abs(sd(vi))
                    current = []
                else:
                    si, sj = sd(vi), sd(vj)
                    pt = tuple(vi + (si / (si - sj)) * (vj - vi))
                    current = [pt]
                    key = 0.0
                events.append((along(pt), key, False, len(chains)))
    if not chains:
        return kept

    events.sort(key=lambda e: (e[0], e[1]))
    next_chain = {}
    entries_free = [k for k, e in enumerate(events) if not e[2]]
    used = set()
    for k, (t, key, is_exit, c) in enumerate(events):
        if not is_exit:
            continue
        target = None
        for m in range(k + 1, len(events)):
            if not events[m][2] and m not in used:
                target = m
                break
        if target is None:  # numerical fallback: any unclaimed entry
            rest = [m for m in entries_free if m not in used]
            target = rest[0]
        used.add(target)
        next_chain[c] = events[target][3]

    visited = set()
    for c0 in range(len(chains)):
        if c0 in visited:
            continue
        ring, c = [], c0
        while c not in visited:
            visited.add(c)
            ring.extend(chains[c])
            c = next_chain[c]
        kept.append(ring)
    return kept


def _assemble(rings: list, area_eps: float) -> MultiPolygon:
    outers, holes = [], []
    for r in rings:
        r = _drop_spikes(r)
        if len(r) < 3:
            continue
        arr = np.array(r)
        area = signed_area(arr)
        if abs(area) <= area_eps:
            continue
        (outers if area > 0 else holes).append(arr)
    if not outers:
        return MultiPolygon(())
    outer_polys = [Polygon(o) for o in outers]
    areas = [p.area for p in outer_polys]
    assigned: list[list] = [[] for _ in outers]
    for h in holes:
        best = None
        for k, o in enumerate(outer_polys):
            if points_in_polygon(h, o).all() and (best is None or areas[k] < areas[best]):
                best = k
        if best is not None:
            assigned[best].append(h)
    parts = [Polygon(o.outer, tuple(hs)) for o, hs in zip(outer_polys, assigned)]
    return MultiPolygon(tuple(parts))


def clip_polygon_to_convex(subject, clip) -> MultiPolygon:
    """Intersection of ``subject`` with the convex region bounded by ``clip``.

    ``clip`` must be a convex ring (either winding).  The subject is cut by
    each half-plane of the clip ring in turn.  When one operand lies wholly
    inside the other, that operand is returned verbatim.  An empty result is
    an empty MultiPolygon.
    """
    mp = MultiPolygon.of(subject)
    ring = _oriented(_as_ring(clip), ccw=True)
    if mp.is_empty:
        return mp
    ring_t = [tuple(v) for v in ring]

    all_vertices = np.vstack(mp.rings)
    n = len(ring)
    inside_all = True
    for i in range(n):
        if (orient2d_many(ring[i], ring[(i + 1) % n], all_vertices) < 0).any():
            inside_all = False
            break
    if inside_all:
        return mp

    entered = any(
        _segment_enters_convex(tuple(e[0]), tuple(e[1]), ring_t)
        for e in boundary_segments(mp)
    )
    if not entered:
        if point_in_polygon(_ring_interior_point(ring), mp):
            return MultiPolygon((Polygon(ring),))
        return MultiPolygon(())

    rings = [[tuple(v) for v in r] for r in mp.rings]
    for i in range(n):
        rings = _clip_rings_halfplane(rings, ring[i], ring[(i + 1) % n])
        if not rings:
            return MultiPolygon(())
    x0, y0 = ring.min(axis=0)
    x1, y1 = ring.max(axis=0)
    area_eps = 1e-12 * ((x1 - x0) ** 2 + (y1 - y0) ** 2)
    return _assemble(rings, area_eps)
