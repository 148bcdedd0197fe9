"""GeoJSON FeatureCollections of Polygon / MultiPolygon districts."""

from __future__ import annotations

import json
import re

import numpy as np

from ..errors import DegenerateInput, ParseError, UnsupportedGeometry
from ..geometry import MultiPolygon, Polygon
from .feature import Feature

__all__ = ["read_geojson", "write_geojson", "PLANAR_CRS_NAME"]

PLANAR_CRS_NAME = "urn:medialhull:planar-meters"
_GEOGRAPHIC_CRS = re.compile(r"CRS84|EPSG:+(4326|4269|4258)\b", re.IGNORECASE)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _polygon(coords, where) -> Polygon:
    if not isinstance(coords, list) or not coords:
        raise ParseError(f"{where}: polygon needs at least one ring")
    try:
        rings = [np.asarray(r, dtype=float) for r in coords]
    except (TypeError, ValueError):
        raise ParseError(f"{where}: ring coordinates must be numeric") from None
    for r in rings:
        if r.ndim != 2 or r.shape[1] < 2:
            raise ParseError(f"{where}: positions must be [x, y] pairs")
    try:
        return Polygon(rings[0][:, :2], tuple(r[:, :2] for r in rings[1:]))
    except (DegenerateInput, ValueError) as e:
        raise ParseError(f"{where}: {e}") from None


def _geometry(geom, where) -> MultiPolygon:
    if not isinstance(geom, dict):
        raise ParseError(f"{where}: geometry must be an object")
    kind = geom.get("type")
    coords = geom.get("coordinates")
    if kind == "Polygon":
        return MultiPolygon((_polygon(coords, where),))
    if kind == "MultiPolygon":
        if not isinstance(coords, list) or not coords:
            raise ParseError(f"{where}: empty MultiPolygon")
        return MultiPolygon(tuple(_polygon(c, f"{where} part {i}") for i, c in enumerate(coords)))
    raise UnsupportedGeometry(f"{where}: geometry type {kind!r} is not areal")


def _looks_geographic(doc, geoms) -> bool:
    crs = doc.get("crs") if isinstance(doc, dict) else None
    if isinstance(crs, dict):
        name = str((crs.get("properties") or {}).get("name", ""))
        return bool(_GEOGRAPHIC_CRS.search(name))
    pts = np.vstack([r for g in geoms for r in g.rings])
    return bool(np.all(np.abs(pts[:, 0]) <= 180) and np.all(np.abs(pts[:, 1]) <= 90))


def read_geojson(stream, geographic: bool | None = None) -> list[Feature]:
    """Parse a FeatureCollection (or a single Feature) from a byte stream.

    Coordinates are taken as lon/lat when a ``crs`` member names a
    geographic CRS, or, without one, when every position fits the lon/lat
    range.  Pass ``geographic`` to skip the guess.
    """
    raw = stream.read()
    try:
        text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw
    except UnicodeDecodeError as e:
        raise ParseError("input is not valid UTF-8", e.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", _byte_offset(text, e.pos)) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", 0)
    if doc.get("type") == "Feature":
        items = [doc]
    elif doc.get("type") == "FeatureCollection":
        items = doc.get("features")
        if not isinstance(items, list):
            raise ParseError("FeatureCollection.features must be an array")
    else:
        raise ParseError(f"expected a FeatureCollection, got type {doc.get('type')!r}", 0)

    geoms, props = [], []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or item.get("type") != "Feature":
            raise ParseError(f"feature {i}: not a Feature object")
        geoms.append(_geometry(item.get("geometry"), f"feature {i}"))
        p = item.get("properties") or {}
        if not isinstance(p, dict):
            raise ParseError(f"feature {i}: properties must be an object")
        props.append({k: "" if v is None else str(v) for k, v in p.items()})
    if geographic is None:
        geographic = bool(geoms) and _looks_geographic(doc, geoms)
    return [Feature(g, p, geographic) for g, p in zip(geoms, props)]


def _ring_coords(ring) -> list:
    r = np.asarray(ring, dtype=float)
    return [[float(x), float(y)] for x, y in np.vstack([r, r[:1]])]


def write_geojson(features, out) -> None:
    """Write features as a FeatureCollection (rings closed, RFC 7946 winding).

    Planar features get a ``crs`` member so that reading them back does not
    mistake small meter coordinates for lon/lat.
    """
    items = []
    for f in features:
        polys = [[_ring_coords(r) for r in p.rings] for p in f.geometry.parts]
        geom = ({"type": "Polygon", "coordinates": polys[0]} if len(polys) == 1
                else {"type": "MultiPolygon", "coordinates": polys})
        items.append({"type": "Feature", "properties": dict(f.properties), "geometry": geom})
    doc = {"type": "FeatureCollection", "features": items}
    if features and not all(f.geographic for f in features):
        doc["crs"] = {"type": "name", "properties": {"name": PLANAR_CRS_NAME}}
    data = json.dumps(doc, separators=(",", ":"))
    try:
        out.write(data.encode("utf-8"))
    except TypeError:
        out.write(data)
