import numpy as np
import pytest

from medialhull.errors import DegenerateInput
from medialhull.geometry import orient2d_many
from medialhull.voronoi import delaunay, merge_duplicate_sites, sentinel_sites, voronoi_edges

from oracles import in_circumcircle_bruteforce


def test_three_points_one_triangle():
    t = delaunay([[0, 0], [1, 0], [0, 1]])
    assert t.triangles.shape == (1, 3)


def test_square_tie_break_is_lowest_index_diagonal():
    sq = [[0, 0], [1, 0], [1, 1], [0, 1]]
    t = delaunay(sq)
    assert len(t.triangles) == 2
    shared = set(t.triangles[0]) & set(t.triangles[1])
    assert shared == {0, 2}
    # same answer whatever order Qhull happens to see
    t2 = delaunay([sq[2], sq[3], sq[0], sq[1]])
    assert set(t2.triangles[0]) & set(t2.triangles[1]) == {0, 2}


@pytest.mark.parametrize("sites", [[[0, 0], [1, 1]], [[0, 0], [1, 1], [2, 2]]])
def test_delaunay_degenerate(sites):
    with pytest.raises(DegenerateInput):
        delaunay(sites)


def test_delaunay_rejects_duplicates():
    with pytest.raises(DegenerateInput):
        delaunay([[0, 0], [1, 0], [0, 1], [0, 0]])


def test_merge_duplicate_sites():
    pts = np.array([[0, 0], [1, 0], [1e-12, 0], [1, 1], [1, 0]], float)
    assert merge_duplicate_sites(pts).tolist() == [[0, 0], [1, 0], [1, 1]]


@pytest.mark.parametrize("n", [50, 200])
def test_empty_circumcircle_oracle(rng, n):
    pts = rng.uniform(0, 1000, size=(n, 2))
    t = delaunay(pts)
    o = orient2d_many(pts[t.triangles[:, 0]], pts[t.triangles[:, 1]], pts[t.triangles[:, 2]])
    assert (o > 0).all()
    for tri in t.triangles:
        assert not in_circumcircle_bruteforce(pts, tuple(tri))


def test_cocircular_and_grid_inputs_stay_delaunay():
    th = 2 * np.pi * np.arange(64) / 64
    ring = np.column_stack([np.cos(th), np.sin(th)]) * 100
    grid = np.array([[x, y] for x in range(8) for y in range(8)], float)
    for pts in (ring, grid):
        t = delaunay(pts)
        for tri in t.triangles:
            assert not in_circumcircle_bruteforce(pts, tuple(tri))


def test_triangulation_covers_hull_area(rng):
    pts = rng.normal(size=(300, 2))
    t = delaunay(pts)
    a, b, c = (pts[t.triangles[:, i]] for i in range(3))
    area = 0.5 * np.abs((b - a)[:, 0] * (c - a)[:, 1] - (b - a)[:, 1] * (c - a)[:, 0]).sum()
    from medialhull.geometry import convex_hull, signed_area
    assert area == pytest.approx(signed_area(convex_hull(pts)), rel=1e-12)


def test_euler_consistency(rng):
    pts = rng.uniform(size=(120, 2))
    t = delaunay(pts)
    n_hull = int((t.neighbors < 0).sum())
    # V - E + F = 2 with the outer face, and 3F = 2E - hull edges
    assert len(pts) - len(t.edges()) + len(t.triangles) + 1 == 2
    assert 3 * len(t.triangles) == 2 * len(t.edges()) - n_hull


def test_bisector_of_two_sites():
    vd = voronoi_edges([[-1, 0], [1, 0]])
    segs = vd.segments.segments
    assert len(segs) == 1 and np.all(segs[:, :, 0] == 0)


def test_square_sites_give_plus():
    vd = voronoi_edges([[0, 0], [1, 0], [1, 1], [0, 1]])
    segs = vd.segments.segments
    assert len(segs) == 4
    for a, b in segs:
        assert a[0] == b[0] == 0.5 or a[1] == b[1] == 0.5   # on x=0.5 or y=0.5
        assert np.allclose(a, 0.5) or np.allclose(b, 0.5)   # reaches the center


def test_three_sites_meet_at_circumcenter():
    sites = np.array([[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]])
    vd = voronoi_edges(sites)
    assert len(vd.edges) == 3
    # circumcenter solves |x-a| = |x-b| = |x-c|
    A = 2 * np.array([sites[1] - sites[0], sites[2] - sites[0]])
    rhs = np.array([sites[1] @ sites[1] - sites[0] @ sites[0],
                    sites[2] @ sites[2] - sites[0] @ sites[0]])
    cc = np.linalg.solve(A, rhs)
    for seg, (i, j) in zip(vd.segments.segments, vd.edge_sites):
        end = seg[np.argmin(np.hypot(*(seg - cc).T))]
        assert np.allclose(end, cc, atol=1e-9)
        di, dj = np.hypot(*(seg - sites[i]).T), np.hypot(*(seg - sites[j]).T)
        assert np.allclose(di, dj, rtol=1e-9)


def test_edges_equidistant_and_nearest(rng):
    sites = rng.uniform(0, 1e4, size=(200, 2))
    vd = voronoi_edges(sites)
    t = np.linspace(0, 1, 5)[:, None, None]
    segs = vd.segments.segments
    pts = segs[None, :, 0] + t * (segs[None, :, 1] - segs[None, :, 0])   # (5, m, 2)
    i, j = vd.edge_sites.T
    di = np.hypot(*(pts - sites[i]).transpose(2, 0, 1))
    dj = np.hypot(*(pts - sites[j]).transpose(2, 0, 1))
    assert np.allclose(di, dj, rtol=1e-6)
    allmin = np.min([np.hypot(*(pts - s).transpose(2, 0, 1)) for s in sites], axis=0)
    assert np.all(di <= allmin * (1 + 1e-6) + 1e-6)


def test_edges_unique_and_inside_sentinel_box(rng):
    sites = rng.uniform(0, 100, size=(150, 2))
    vd = voronoi_edges(sites, margin_factor=10.0)
    pairs = {tuple(p) for p in vd.edge_sites}
    assert len(pairs) == len(vd.edge_sites)
    assert (vd.edge_sites < len(sites)).all()
    margin = 10.0 * np.hypot(*np.ptp(sites, axis=0))
    lo = sites.min(axis=0) - margin
    hi = sites.max(axis=0) + margin
    ends = vd.segments.segments.reshape(-1, 2)
    assert np.all((ends >= lo) & (ends <= hi))
    assert np.all(vd.segments.lengths > 0)


def test_dual_edge_count_matches_adjacency(rng):
    sites = rng.uniform(size=(80, 2))
    vd = voronoi_edges(sites)
    box = sentinel_sites((*sites.min(axis=0), *sites.max(axis=0)),
                         10 * np.hypot(*np.ptp(sites, axis=0)))
    t = delaunay(np.vstack([sites, box]))
    e = t.edges()
    real = e[(e < len(sites)).all(axis=1)]
    assert len(vd.edges) == len(real)


def test_deterministic(rng):
    sites = rng.uniform(size=(300, 2))
    a, b = voronoi_edges(sites), voronoi_edges(sites.copy())
    assert np.array_equal(a.vertices[a.edges], b.vertices[b.edges])
    assert np.array_equal(a.edge_sites, b.edge_sites)
