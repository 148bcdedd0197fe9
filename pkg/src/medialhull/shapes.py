"""Synthetic districts in projected meters, for tests, demos and calibration."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Polygon

__all__ = ["rectangle", "regular_polygon", "l_shape", "c_shape",
           "random_convex_polygon", "spiral_district", "thick_polyline",
           "sawtooth_border"]


def rectangle(width: float, height: float, x0: float = 0.0, y0: float = 0.0) -> Polygon:
    return Polygon([[x0, y0], [x0 + width, y0], [x0 + width, y0 + height], [x0, y0 + height]])


def regular_polygon(n: int, radius: float, center=(0.0, 0.0), phase_deg: float = 0.0) -> Polygon:
    """Regular ``n``-gon; with ``phase_deg=0`` a vertex sits due east."""
    th = np.radians(phase_deg + 360.0 * np.arange(n) / n)
    return Polygon(np.column_stack([np.cos(th), np.sin(th)]) * radius + np.asarray(center, float))


def l_shape(size: float, arm: float) -> Polygon:
    """An L: a ``size`` square with the upper-right ``size - arm`` square removed."""
    return Polygon([[0, 0], [size, 0], [size, arm], [arm, arm], [arm, size], [0, size]])


def c_shape(width: float, height: float, thickness: float) -> Polygon:
    """A C opening to the east."""
    w, h, t = width, height, thickness
    return Polygon([[0, 0], [w, 0], [w, t], [t, t], [t, h - t], [w, h - t], [w, h], [0, h]])


def random_convex_polygon(rng: np.random.Generator, n: int, diameter: float,
                          center=(0.0, 0.0)) -> Polygon:
    """Strictly convex polygon with ``n`` vertices on a random ellipse."""
    th = np.sort(rng.uniform(0, 2 * np.pi, n))
    while np.min(np.diff(np.append(th, th[0] + 2 * np.pi))) < 1e-3:
        th = np.sort(rng.uniform(0, 2 * np.pi, n))
    a = diameter / 2
    b = a * rng.uniform(0.3, 1.0)
    rot = rng.uniform(0, np.pi)
    x, y = a * np.cos(th), b * np.sin(th)
    c, s = math.cos(rot), math.sin(rot)
    pts = np.column_stack([c * x - s * y, s * x + c * y]) + np.asarray(center, float)
    return Polygon(pts)


def thick_polyline(centerline, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Left and right mitred offsets of a polyline at ``width / 2``."""
    c = np.asarray(centerline, float)
    u = np.diff(c, axis=0)
    u /= np.hypot(u[:, 0], u[:, 1])[:, None]
    nrm = np.column_stack([-u[:, 1], u[:, 0]])
    offs = [nrm[0]]
    for a, b in zip(nrm[:-1], nrm[1:]):
        offs.append((a + b) / (1.0 + a @ b))
    offs.append(nrm[-1])
    offs = np.array(offs) * (width / 2)
    return c + offs, c - offs


def spiral_district(disk_radius: float = 9_000.0, arm_width: float = 2_500.0,
                    elbow_radius: float = 24_000.0, arm_gap: float = 2_500.0,
                    disk_vertices: int = 360, arms: int = 3) -> Polygon:
    """A round core with ``arms`` pinwheel arms curling counterclockwise.

    Each arm leaves the core radially, turns left at ``elbow_radius`` and
    runs along the side of the regular ``arms``-gon through the elbows,
    stopping ``arm_gap`` short of the next arm.  The defaults give a
    medial-hull ratio near 3.5 and a meanderingness near 0.58.
    """
    R0, w = disk_radius, arm_width
    step = 2 * math.pi / arms
    half = math.asin(w / 2 / R0)  # angular half-width of an arm at the core
    elbows = [elbow_radius * np.array([math.cos(k * step), math.sin(k * step)])
              for k in range(arms)]
    disk_th = 2 * math.pi * np.arange(disk_vertices) / disk_vertices
    outline = []
    for k in range(arms):
        phi = k * step
        side = elbows[(k + 1) % arms] - elbows[k]
        side_len = float(np.hypot(*side))
        tip = elbows[k] + side * (side_len - arm_gap - w) / side_len
        left, right = thick_polyline(np.array([[0.0, 0.0], elbows[k], tip]), w)
        radial = np.array([math.cos(phi), math.sin(phi)])
        normal = np.array([-radial[1], radial[0]])
        root = math.sqrt(R0 * R0 - (w / 2) ** 2) * radial
        # core arc from the previous arm's left flank to this arm's right flank
        rel = (disk_th - (phi - step + half)) % (2 * math.pi)
        keep = (rel > 0) & (rel < step - 2 * half)
        arc = phi - step + half + np.sort(rel[keep])
        outline.extend(R0 * np.column_stack([np.cos(arc), np.sin(arc)]))
        outline.append(root - (w / 2) * normal)
        outline.extend(right[1:])
        outline.extend(left[1:][::-1])
        outline.append(root + (w / 2) * normal)
    return Polygon(np.array(outline))


def sawtooth_border(teeth: int = 8, depth: float = 3_000.0, height: float = 40_000.0,
                    width: float = 12_000.0, dent: float = 3_000.0):
    """A district lying against a jagged state border, and that state.

    The district's west side follows the state's sawtooth border; its east
    side has a shallow inward dent that the convex hull fills in.  Returns
    ``(district, state)``.
    """
    ys = np.linspace(0.0, height, 2 * teeth + 1)
    xs = np.where(np.arange(len(ys)) % 2, -depth, 0.0)
    west = np.column_stack([xs, ys])
    district = Polygon(np.vstack([west, [[width, height], [width - dent, height / 2],
                                         [width, 0.0]]]))
    # the state's border keeps the same teeth well past the district
    pitch = height / teeth
    ys2 = np.linspace(-teeth * pitch, 2 * height, 6 * teeth + 1)
    xs2 = np.where(np.arange(len(ys2)) % 2, -depth, 0.0)
    far = width + 100 * depth
    state = Polygon(np.vstack([np.column_stack([xs2, ys2]),
                               [[far, ys2[-1]], [far, ys2[0]]]]))
    return district, state
