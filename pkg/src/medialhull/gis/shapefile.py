"""Minimal ESRI shapefile reader: Polygon shapes (type 5) and their DBF rows.

That is all TIGER/Line district files use.  Coordinates are NAD83 lon/lat.
"""

from __future__ import annotations

import logging
import struct

import numpy as np

from ..errors import BadMagic, ParseError, RecordLengthMismatch, ShapeTypeUnsupported
from ..geometry import MultiPolygon, Polygon, point_in_polygon, points_on_boundary, signed_area
from .feature import Feature

log = logging.getLogger(__name__)

__all__ = ["read_shapefile", "read_dbf", "nest_rings"]

FILE_CODE = 9994
POLYGON = 5
NULL_SHAPE = 0
HEADER_SIZE = 100


def _read_all(stream) -> bytes:
    data = stream.read()
    return data if isinstance(data, bytes) else bytes(data)


def _ring_point(ring, other) -> np.ndarray:
    """A vertex of ``ring`` not on the boundary of ``other`` (first one if none)."""
    off = points_on_boundary(ring, Polygon(other))
    idx = np.nonzero(~off)[0]
    return ring[idx[0] if len(idx) else 0]


def nest_rings(rings: list) -> MultiPolygon:
    """Group shapefile rings into polygons.

    Clockwise rings are outers and counterclockwise rings holes, per the
    shapefile convention.  Each hole goes to the smallest outer containing
    it; a hole inside no outer is promoted to an outer of its own.
    """
    rings = [r for r in rings if len(r) >= 3 and signed_area(r) != 0]
    outers = [r for r in rings if signed_area(r) < 0]
    holes = [r for r in rings if signed_area(r) > 0]
    if not outers:
        # Wrong winding throughout: treat every ring as an outer.
        outers, holes = holes, []
    owned = [[] for _ in outers]
    areas = [abs(signed_area(o)) for o in outers]
    for h in holes:
        best = None
        for i, o in enumerate(outers):
            if areas[i] > abs(signed_area(h)) and point_in_polygon(_ring_point(h, o), Polygon(o)):
                if best is None or areas[i] < areas[best]:
                    best = i
        if best is None:
            log.warning("hole ring outside every outer ring; keeping it as an outer")
            outers.append(h)
            owned.append([])
            areas.append(abs(signed_area(h)))
        else:
            owned[best].append(h)
    return MultiPolygon(tuple(Polygon(o, tuple(hs)) for o, hs in zip(outers, owned)))


def _parse_polygon(content: bytes, offset: int) -> list:
    if len(content) < 44:
        raise RecordLengthMismatch("polygon record shorter than its fixed header", offset)
    nparts, npoints = struct.unpack_from("<ii", content, 36)
    need = 44 + 4 * nparts + 16 * npoints
    if nparts < 1 or npoints < 0 or need != len(content):
        raise RecordLengthMismatch(
            f"polygon record declares {nparts} parts / {npoints} points "
            f"({need} bytes) but holds {len(content)} bytes", offset)
    parts = np.frombuffer(content, "<i4", nparts, 44).astype(int)
    pts = np.frombuffer(content, "<f8", 2 * npoints, 44 + 4 * nparts).reshape(-1, 2)
    bounds = list(parts) + [npoints]
    if bounds[0] != 0 or any(b > c for b, c in zip(bounds[:-1], bounds[1:])):
        raise ParseError("polygon part indices are not increasing", offset)
    rings = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        ring = pts[a:b]
        if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
            ring = ring[:-1]
        rings.append(ring)
    return rings


def _read_shp(data: bytes) -> list:
    if len(data) < HEADER_SIZE:
        raise RecordLengthMismatch("file shorter than the 100-byte header", len(data))
    code, = struct.unpack_from(">i", data, 0)
    if code != FILE_CODE:
        raise BadMagic(f"file code {code} is not {FILE_CODE}", 0)
    words, = struct.unpack_from(">i", data, 24)
    version, shape_type = struct.unpack_from("<ii", data, 28)
    if shape_type != POLYGON:
        raise ShapeTypeUnsupported(f"shape type {shape_type} (only Polygon, type 5)", 32)
    end = 2 * words
    if end != len(data):
        raise RecordLengthMismatch(f"header says {end} bytes, file has {len(data)}", 24)
    records = []
    pos = HEADER_SIZE
    while pos < end:
        if pos + 8 > end:
            raise RecordLengthMismatch("truncated record header", pos)
        _num, clen = struct.unpack_from(">ii", data, pos)
        start, stop = pos + 8, pos + 8 + 2 * clen
        if clen < 2 or stop > end:
            raise RecordLengthMismatch(f"record content of {2 * clen} bytes overruns the file", pos)
        content = data[start:stop]
        kind, = struct.unpack_from("<i", content, 0)
        if kind == NULL_SHAPE:
            records.append(None)
        elif kind == POLYGON:
            records.append(_parse_polygon(content, start))
        else:
            raise ShapeTypeUnsupported(f"record shape type {kind}", start)
        pos = stop
    return records


def read_dbf(stream) -> list[dict]:
    """Rows of a dBASE III table as ``{field: stripped text}``."""
    data = _read_all(stream)
    if len(data) < 32:
        raise RecordLengthMismatch("DBF shorter than its header", len(data))
    nrec, hlen, rlen = struct.unpack_from("<IHH", data, 4)
    fields = []
    pos = 32
    width = 1
    while pos < hlen - 1 and data[pos] != 0x0D:
        name = data[pos:pos + 11].split(b"\0", 1)[0].decode("ascii", "replace").strip()
        flen = data[pos + 16]
        fields.append((name, width, flen))
        width += flen
        pos += 32
    if width != rlen:
        raise RecordLengthMismatch(f"DBF fields span {width} bytes, record length is {rlen}", 10)
    if hlen + nrec * rlen > len(data):
        raise RecordLengthMismatch(f"DBF holds fewer than {nrec} records", len(data))
    rows = []
    for i in range(nrec):
        rec = data[hlen + i * rlen: hlen + (i + 1) * rlen]
        row = {}
        for name, off, flen in fields:
            raw = rec[off:off + flen]
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                text = raw.decode("latin-1")
            row[name] = text.strip(" \0")
        rows.append(row)
    return rows


def read_shapefile(shp, dbf=None) -> list[Feature]:
    """Features from a ``.shp`` stream and its optional ``.dbf`` stream.

    Geometries are lon/lat (``geographic=True``).  Null shapes are skipped
    along with their attribute rows.
    """
    records = _read_shp(_read_all(shp))
    rows = read_dbf(dbf) if dbf is not None else [{} for _ in records]
    if len(rows) != len(records):
        raise RecordLengthMismatch(f"{len(records)} shapes but {len(rows)} DBF rows")
    out = []
    for i, (rings, props) in enumerate(zip(records, rows)):
        if rings is None:
            log.warning("record %d has a null shape; skipped", i + 1)
            continue
        geom = nest_rings(rings)
        if geom.is_empty:
            log.warning("record %d has no usable rings; skipped", i + 1)
            continue
        out.append(Feature(geom, props, geographic=True))
    return out
