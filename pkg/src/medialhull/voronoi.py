"""Delaunay triangulation of point sites and the dual Voronoi edge set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay as _Qhull
from scipy.spatial import cKDTree

from .errors import DegenerateInput
from .geometry import SegmentSet, incircle, incircle_many, orient2d, orient2d_many

__all__ = ["Triangulation", "VoronoiDiagram", "delaunay", "voronoi_edges",
           "merge_duplicate_sites", "sentinel_sites"]

DUPLICATE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Triangulation:
    sites: np.ndarray
    triangles: np.ndarray   # (m, 3) site indices, counterclockwise
    neighbors: np.ndarray   # (m, 3) triangle across the edge opposite vertex j, -1 on the hull

    def edges(self) -> np.ndarray:
        """Unique undirected site pairs, sorted."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)


@dataclass(frozen=True, eq=False)
class VoronoiDiagram:
    sites: np.ndarray
    vertices: np.ndarray      # circumcenters (plus any box-clipped endpoints)
    edges: np.ndarray         # (k, 2) vertex index pairs
    edge_sites: np.ndarray    # (k, 2) generating site pair per edge
    n_real_sites: int

    @property
    def segments(self) -> SegmentSet:
        return SegmentSet(self.vertices[self.edges], self.edge_sites)


def merge_duplicate_sites(sites, tol: float = DUPLICATE_TOLERANCE) -> np.ndarray:
    """Drop sites closer than ``tol`` to an earlier site (first one wins)."""
    pts = np.asarray(sites, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        return pts.copy()
    pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
    if not len(pairs):
        return pts.copy()
    drop = np.zeros(len(pts), dtype=bool)
    for i, j in sorted(map(tuple, np.sort(pairs, axis=1))):
        if not drop[i]:
            drop[j] = True
    return pts[~drop]


def _check_sites(pts: np.ndarray) -> None:
    if len(pts) < 3:
        raise DegenerateInput("triangulation needs at least 3 distinct sites")
    a = pts[0]
    far = pts[np.argmax(np.hypot(*(pts - a).T))]
    if not np.any(orient2d_many(a, far, pts) != 0):
        raise DegenerateInput("all sites are collinear")


def _legalize(pts, tris: list, nbrs: list) -> None:
    """Lawson flips until every edge is locally Delaunay (exact predicates).

    Cocircular quadrilaterals keep the diagonal whose sorted site pair is
    lexicographically smallest, which makes the result unique.
    """
    def edge_ok(t, i):
        n = nbrs[t][i]
        if n < 0:
            return True
        c, a, b = tris[t][i], tris[t][(i + 1) % 3], tris[t][(i + 2) % 3]
        j = nbrs[n].index(t)
        d = tris[n][j]
        s = incircle(pts[c], pts[a], pts[b], pts[d])
        if s > 0:
            return False
        if s < 0:
            return True
        return sorted((a, b)) <= sorted((c, d))

    T = np.array(tris)
    N = np.array(nbrs)
    # Vectorized first pass; only edges not clearly legal go on the stack.
    stack = []
    for i in range(3):
        has = N[:, i] >= 0
        ts = np.nonzero(has)[0]
        if not len(ts):
            continue
        nb = N[ts, i]
        j = np.argmax(N[nb] == ts[:, None], axis=1)
        d = T[nb, j]
        s = incircle_many(pts[T[ts, i]], pts[T[ts, (i + 1) % 3]],
                          pts[T[ts, (i + 2) % 3]], pts[d])
        stack.extend((int(t), i) for t in ts[s >= 0])

    while stack:
        t, i = stack.pop()
        if edge_ok(t, i):
            continue
        n = nbrs[t][i]
        c, a, b = tris[t][i], tris[t][(i + 1) % 3], tris[t][(i + 2) % 3]
        j = nbrs[n].index(t)
        d = tris[n][j]
        # t = (c, a, b), n = (d, b, a); neighbours across each outer edge
        n_bc = nbrs[t][(i + 1) % 3]
        n_ca = nbrs[t][(i + 2) % 3]
        n_ad = nbrs[n][(j + 1) % 3]
        n_db = nbrs[n][(j + 2) % 3]
        tris[t] = [c, a, d]
        nbrs[t] = [n_ad, n, n_ca]
        tris[n] = [d, b, c]
        nbrs[n] = [n_bc, t, n_db]
        if n_ad >= 0:
            nbrs[n_ad][nbrs[n_ad].index(n)] = t
        if n_bc >= 0:
            nbrs[n_bc][nbrs[n_bc].index(t)] = n
        stack.extend([(t, 0), (t, 2), (n, 0), (n, 2)])


def delaunay(sites) -> Triangulation:
    """Delaunay triangulation with exact empty-circle guarantees.

    Qhull supplies the initial triangulation; a Lawson pass with exact
    predicates then repairs any roundoff-induced violations and resolves
    cocircular ties deterministically.  Sites that Qhull refuses as
    near-coincident are left out of every triangle.
    """
    pts = np.asarray(sites, dtype=float).reshape(-1, 2)
    if len(np.unique(pts, axis=0)) != len(pts):
        raise DegenerateInput("duplicate sites; merge them first")
    _check_sites(pts)
    origin = pts.mean(axis=0)
    local = pts - origin
    qh = _Qhull(local)
    tris = qh.simplices.astype(np.int64)
    nbrs = qh.neighbors.astype(np.int64)
    # Qhull's winding is arbitrary; make every triangle CCW.
    o = orient2d_many(local[tris[:, 0]], local[tris[:, 1]], local[tris[:, 2]])
    flip = o < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    nbrs[flip] = nbrs[flip][:, [0, 2, 1]]
    keep = o != 0
    if not keep.all():
        # Drop slivers Qhull emitted for exactly collinear triples and re-index.
        remap = -np.ones(len(tris), dtype=np.int64)
        remap[keep] = np.arange(keep.sum())
        tris = tris[keep]
        nbrs = np.where(nbrs[keep] >= 0, remap[nbrs[keep]], -1)
    tl = tris.tolist()
    nl = nbrs.tolist()
    _legalize(local, tl, nl)
    return Triangulation(pts, np.array(tl, dtype=np.int64).reshape(-1, 3),
                         np.array(nl, dtype=np.int64).reshape(-1, 3))


def circumcenters(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a = pts[tris[:, 0]]
    b = pts[tris[:, 1]] - a
    c = pts[tris[:, 2]] - a
    d = 2.0 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    bb = (b * b).sum(axis=1)
    cc = (c * c).sum(axis=1)
    ux = (c[:, 1] * bb - b[:, 1] * cc) / d
    uy = (b[:, 0] * cc - c[:, 0] * bb) / d
    return a + np.column_stack([ux, uy])


def sentinel_sites(extent, margin: float) -> np.ndarray:
    """Eight far-away sites on the corners and edge midpoints of a box
    grown by ``margin`` on every side of ``extent = (x0, y0, x1, y1)``."""
    x0, y0, x1, y1 = extent
    x0, y0, x1, y1 = x0 - margin, y0 - margin, x1 + margin, y1 + margin
    xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
    return np.array([[x0, y0], [xm, y0], [x1, y0], [x1, ym],
                     [x1, y1], [xm, y1], [x0, y1], [x0, ym]], dtype=float)


def _clip_to_box(p, q, box):
    """Liang-Barsky; returns the clipped segment or None."""
    x0, y0, x1, y1 = box
    dx, dy = q[0] - p[0], q[1] - p[1]
    lo, hi = 0.0, 1.0
    for num, den in ((p[0] - x0, -dx), (x1 - p[0], dx), (p[1] - y0, -dy), (y1 - p[1], dy)):
        if den == 0:
            if num < 0:
                return None
            continue
        t = num / -den
        if den < 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if lo >= hi:
        return None
    return p + lo * np.subtract(q, p), p + hi * np.subtract(q, p)


def voronoi_edges(sites, extent=None, sentinel_margin: float | None = None,
                  margin_factor: float = 10.0) -> VoronoiDiagram:
    """Finite Voronoi edges between real sites.

    Eight sentinel sites are placed ``sentinel_margin`` outside ``extent``
    (default: the sites' bounding box and ``margin_factor`` times its
    diagonal).  Every edge bordering a sentinel cell is discarded, so all
    remaining edges are finite segments, each listed once.
    """
    pts = np.asarray(sites, dtype=float).reshape(-1, 2)
    # The sentinels keep the full site set non-degenerate, so two distinct
    # (or collinear) real sites are enough.
    if len(np.unique(pts, axis=0)) < 2:
        raise DegenerateInput("need at least 2 distinct sites")
    if extent is None:
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        extent = (lo[0], lo[1], hi[0], hi[1])
    x0, y0, x1, y1 = extent
    if sentinel_margin is None:
        sentinel_margin = margin_factor * float(np.hypot(x1 - x0, y1 - y0))
    if not sentinel_margin > 0:
        raise ValueError("sentinel margin must be positive")
    n_real = len(pts)
    allpts = np.vstack([pts, sentinel_sites(extent, sentinel_margin)])
    tri = delaunay(allpts)
    origin = allpts.mean(axis=0)
    centers = circumcenters(allpts - origin, tri.triangles) + origin

    T, N = tri.triangles, tri.neighbors
    t_idx, i_idx = np.nonzero(N >= 0)
    nb = N[t_idx, i_idx]
    once = t_idx < nb
    t_idx, i_idx, nb = t_idx[once], i_idx[once], nb[once]
    sa = T[t_idx, (i_idx + 1) % 3]
    sb = T[t_idx, (i_idx + 2) % 3]
    real = (sa < n_real) & (sb < n_real)
    t_idx, nb, sa, sb = t_idx[real], nb[real], sa[real], sb[real]
    p, q = centers[t_idx], centers[nb]
    nonzero = np.any(p != q, axis=1)
    t_idx, nb, sa, sb = t_idx[nonzero], nb[nonzero], sa[nonzero], sb[nonzero]

    vertices = [centers]
    edges = np.column_stack([t_idx, nb])
    box = (x0 - sentinel_margin, y0 - sentinel_margin,
           x1 + sentinel_margin, y1 + sentinel_margin)
    outside = ((centers[:, 0] < box[0]) | (centers[:, 0] > box[2])
               | (centers[:, 1] < box[1]) | (centers[:, 1] > box[3]))
    bad = outside[edges].any(axis=1)
    if bad.any():
        extra = []
        keep = ~bad
        next_id = len(centers)
        for k in np.nonzero(bad)[0]:
            clipped = _clip_to_box(centers[edges[k, 0]], centers[edges[k, 1]], box)
            if clipped is None:
                continue
            extra.append(clipped)
            edges[k] = (next_id, next_id + 1)
            next_id += 2
            keep[k] = True
        if extra:
            vertices.append(np.array(extra).reshape(-1, 2))
        edges, sa, sb = edges[keep], sa[keep], sb[keep]
    lo_site = np.minimum(sa, sb)
    hi_site = np.maximum(sa, sb)
    order = np.lexsort((hi_site, lo_site))
    return VoronoiDiagram(
        sites=pts,
        vertices=np.vstack(vertices),
        edges=edges[order],
        edge_sites=np.column_stack([lo_site, hi_site])[order],
        n_real_sites=n_real,
    )
