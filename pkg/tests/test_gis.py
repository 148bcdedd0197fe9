import io
import json
import math
import struct
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from medialhull.errors import (BadMagic, OutOfDomain, ParseError, RecordLengthMismatch,
                               ShapeTypeUnsupported, UnsupportedGeometry)
from medialhull.geometry import MultiPolygon, Polygon, SegmentSet
from medialhull.gis import (Feature, UtmZoneSpec, project_to_utm, read_dbf, read_geojson,
                            read_report_csv, read_shapefile, render_svg, utm_forward,
                            utm_inverse, write_geojson, write_handley_csv, write_report_csv,
                            zone_for)
from medialhull.gis.report import REPORT_HEADER
from medialhull.metrics import RatioReport
from medialhull.shapes import rectangle

from shpwriter import dbf_bytes, shp_bytes

pyproj = pytest.importorskip("pyproj")

SQUARE_GEOJSON = {"type": "FeatureCollection", "features": [{
    "type": "Feature", "properties": {"STATEFP": "42", "CD115FP": "07"},
    "geometry": {"type": "Polygon",
                 "coordinates": [[[0, 0], [0, 1000], [1000, 1000], [1000, 0], [0, 0]]]}}]}


def as_stream(doc):
    return io.BytesIO(json.dumps(doc).encode())


# GeoJSON

def test_geojson_square():
    [f] = read_geojson(as_stream(SQUARE_GEOJSON))
    assert (f.statefp, f.district_id) == ("42", "07")
    assert f.geometry.area == 1_000_000
    assert not f.geographic


def test_geojson_lonlat_detection_and_crs():
    doc = json.loads(json.dumps(SQUARE_GEOJSON))
    doc["features"][0]["geometry"]["coordinates"] = [[[-75, 40], [-75, 41], [-74, 41], [-75, 40]]]
    assert read_geojson(as_stream(doc))[0].geographic
    doc["crs"] = {"type": "name", "properties": {"name": "EPSG:26918"}}
    assert not read_geojson(as_stream(doc))[0].geographic
    doc["crs"]["properties"]["name"] = "urn:ogc:def:crs:OGC:1.3:CRS84"
    assert read_geojson(as_stream(doc))[0].geographic


def test_geojson_multipolygon_hole_and_null_property():
    doc = {"type": "Feature", "properties": {"CD115FP": None, "n": 3},
           "geometry": {"type": "MultiPolygon", "coordinates": [
               [[[0, 0], [10, 0], [10, 10], [0, 10], [0, 0]],
                [[2, 2], [2, 4], [4, 4], [4, 2], [2, 2]]],
               [[[20, 0], [30, 0], [30, 10], [20, 0]]]]}}
    [f] = read_geojson(as_stream(doc), geographic=False)
    assert len(f.geometry.parts) == 2 and len(f.geometry.parts[0].holes) == 1
    assert f.geometry.area == pytest.approx(100 - 4 + 50)
    assert f.properties == {"CD115FP": "", "n": "3"}


def test_geojson_parse_error_offset():
    bad = b'{"type": "FeatureCollection", "features": [,]}'
    with pytest.raises(ParseError) as e:
        read_geojson(io.BytesIO(bad))
    assert e.value.offset == bad.index(b",]")


def test_geojson_parse_error_offset_counts_bytes():
    bad = '{"name": "Señor", x}'.encode()
    with pytest.raises(ParseError) as e:
        read_geojson(io.BytesIO(bad))
    assert e.value.offset == bad.index(b"x}")


def test_geojson_point_unsupported():
    doc = {"type": "FeatureCollection", "features": [
        {"type": "Feature", "properties": {}, "geometry": {"type": "Point", "coordinates": [0, 0]}}]}
    with pytest.raises(UnsupportedGeometry):
        read_geojson(as_stream(doc))


def test_geojson_round_trip():
    fs = [Feature(rectangle(5_000, 3_000), {"STATEFP": "42", "CD115FP": "01"}),
          Feature(MultiPolygon((rectangle(10, 10), rectangle(10, 10, 50, 0))),
                  {"STATEFP": "42", "CD115FP": "02"})]
    buf = io.BytesIO()
    write_geojson(fs, buf)
    back = read_geojson(io.BytesIO(buf.getvalue()))
    for a, b in zip(fs, back):
        assert a.properties == b.properties and not b.geographic
        for pa, pb in zip(a.geometry.parts, b.geometry.parts):
            assert np.array_equal(pa.outer, pb.outer)


# Shapefile

def test_shapefile_square_with_dbf():
    square = [[0, 0], [0, 1], [1, 1], [1, 0]]  # clockwise outer
    shp = shp_bytes([[square]])
    dbf = dbf_bytes([{"STATEFP": "42", "CD115FP": "01"}], [("STATEFP", 2), ("CD115FP", 2)])
    [f] = read_shapefile(io.BytesIO(shp), io.BytesIO(dbf))
    assert f.geographic and f.geometry.area == 1.0
    assert f.properties == {"STATEFP": "42", "CD115FP": "01"}


def test_shapefile_hole_and_multipart():
    outer = [[0, 0], [0, 10], [10, 10], [10, 0]]
    hole = [[2, 2], [4, 2], [4, 4], [2, 4]]           # counterclockwise
    island = [[20, 0], [20, 5], [25, 5], [25, 0]]
    feats = read_shapefile(io.BytesIO(shp_bytes([[outer, hole, island]])))
    [f] = feats
    assert len(f.geometry.parts) == 2
    assert f.geometry.area == pytest.approx(100 - 4 + 25)


def test_shapefile_matches_pyshp(tmp_path):
    shapefile = pytest.importorskip("shapefile")
    path = str(tmp_path / "d")
    with shapefile.Writer(path, shapeType=shapefile.POLYGON) as w:
        w.field("CD115FP", "C", size=2)
        w.poly([[[0, 0], [0, 10], [10, 10], [10, 0], [0, 0]],
                [[2, 2], [4, 2], [4, 4], [2, 4], [2, 2]]])
        w.record("01")
        w.poly([[[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]], [[5, 5], [5, 6], [6, 6], [6, 5], [5, 5]]])
        w.record("02")
    with open(path + ".shp", "rb") as s, open(path + ".dbf", "rb") as d:
        fs = read_shapefile(s, d)
    assert [f.district_id for f in fs] == ["01", "02"]
    assert fs[0].geometry.area == 96 and len(fs[1].geometry.parts) == 2


def test_shapefile_truncated():
    shp = shp_bytes([[[[0, 0], [0, 1], [1, 1], [1, 0]]]])
    with pytest.raises(RecordLengthMismatch):
        read_shapefile(io.BytesIO(shp[:-8]))
    # header length patched to match, record still overruns
    cut = bytearray(shp[:-8])
    struct.pack_into(">i", cut, 24, len(cut) // 2)
    with pytest.raises(RecordLengthMismatch):
        read_shapefile(io.BytesIO(bytes(cut)))


def test_shapefile_bad_magic_and_type():
    sq = [[[[0, 0], [0, 1], [1, 1], [1, 0]]]]
    with pytest.raises(BadMagic):
        read_shapefile(io.BytesIO(shp_bytes(sq, file_code=1234)))
    with pytest.raises(ShapeTypeUnsupported):
        read_shapefile(io.BytesIO(shp_bytes(sq, shape_type=3)))


def test_shapefile_dbf_count_mismatch_and_null_shape():
    sq = [[0, 0], [0, 1], [1, 1], [1, 0]]
    dbf = dbf_bytes([{"CD115FP": "01"}], [("CD115FP", 2)])
    with pytest.raises(RecordLengthMismatch):
        read_shapefile(io.BytesIO(shp_bytes([[sq], [sq]])), io.BytesIO(dbf))
    dbf2 = dbf_bytes([{"CD115FP": "01"}, {"CD115FP": "02"}], [("CD115FP", 2)])
    fs = read_shapefile(io.BytesIO(shp_bytes([None, [sq]])), io.BytesIO(dbf2))
    assert [f.district_id for f in fs] == ["02"]


def test_read_dbf_fields():
    rows = [{"A": "x", "LONGNAME": "hello"}, {"A": "y", "LONGNAME": "é"}]
    assert read_dbf(io.BytesIO(dbf_bytes(rows, [("A", 1), ("LONGNAME", 8)]))) == rows


# Projection

def tmerc(zone: UtmZoneSpec):
    south = " +south" if zone.hemisphere == "S" else ""
    return pyproj.Transformer.from_proj(
        pyproj.Proj("+proj=longlat +ellps=GRS80"),
        pyproj.Proj(f"+proj=utm +zone={zone.zone}{south} +ellps=GRS80 +units=m"),
        always_xy=True)


def test_central_meridian_easting():
    x, y = utm_forward(-75.0, 40.0, UtmZoneSpec(18))
    assert x == pytest.approx(500_000, abs=1e-6)
    assert y == pytest.approx(4_427_757.2186, abs=1e-3)


@pytest.mark.parametrize("zone", [UtmZoneSpec(18), UtmZoneSpec(33, "S"), UtmZoneSpec(1)])
def test_forward_matches_pyproj(rng, zone):
    cm = zone.central_meridian
    lon = cm + rng.uniform(-3.5, 3.5, 200)
    lat = rng.uniform(0, 80, 200) * (1 if zone.hemisphere == "N" else -1)
    x, y = utm_forward(lon, lat, zone)
    ex, ey = tmerc(zone).transform(lon, lat)
    assert np.max(np.hypot(x - ex, y - ey)) < 1e-3


def test_round_trip(rng):
    zone = UtmZoneSpec(18)
    lon = -75 + rng.uniform(-3, 3, 100)
    lat = rng.uniform(25, 49, 100)
    lon2, lat2 = utm_inverse(*utm_forward(lon, lat, zone), zone)
    assert np.max(np.abs(lon2 - lon)) < 1e-6 and np.max(np.abs(lat2 - lat)) < 1e-6


@pytest.mark.parametrize("lat", [85.0, -84.5, math.nan])
def test_out_of_domain(lat):
    with pytest.raises(OutOfDomain):
        utm_forward(-75.0, lat, UtmZoneSpec(18))


def test_scale_factor_on_central_meridian():
    geod = pyproj.Geod(ellps="GRS80")
    lon, lat, _ = geod.fwd(-75.0, 40.0, 0.0, 1000.0)   # 1 km due north
    x0, y0 = utm_forward(-75.0, 40.0, UtmZoneSpec(18))
    x1, y1 = utm_forward(lon, lat, UtmZoneSpec(18))
    assert math.hypot(x1 - x0, y1 - y0) / 1000.0 == pytest.approx(0.9996, rel=1e-4)


def test_zone_spec():
    assert UtmZoneSpec.parse("18n") == UtmZoneSpec(18, "N")
    assert str(UtmZoneSpec.parse(" 7S ")) == "7S"
    assert zone_for(-77.2, 40.9) == UtmZoneSpec(18)
    assert zone_for(151.2, -33.9) == UtmZoneSpec(56, "S")
    assert UtmZoneSpec(60).central_meridian == 177
    for bad in ("0N", "61N", "18X", "eighteen"):
        with pytest.raises(ValueError):
            UtmZoneSpec.parse(bad)


def test_project_feature():
    f = Feature(rectangle(0.1, 0.1, -75.05, 40.0), {"CD115FP": "01"}, geographic=True)
    p = project_to_utm(f)
    assert not p.geographic and p.properties == f.properties
    # 0.1° x 0.1° near 40N is about 8.5 km x 11.1 km
    assert p.geometry.area == pytest.approx(8.53e3 * 11.1e3, rel=0.02)
    with pytest.raises(ValueError):
        project_to_utm(p)


# CSV

def test_report_csv_format_and_order():
    reps = [RatioReport("42", "02", 1234.567, 1000.0, 1.234567, 1),
            RatioReport("36", "10", 3000.0, 1000.0, 3.0, 4),
            RatioReport("42", "01", 2500.0, 1000.0, 2.5, 3)]
    buf = io.BytesIO()
    write_report_csv(reps, buf)
    text = buf.getvalue().decode()
    lines = text.split("\r\n")
    assert lines[0] == ",".join(REPORT_HEADER)
    assert lines[1:4] == ["36,10,3000.00,1000.00,3.00,4", "42,01,2500.00,1000.00,2.50,3",
                          "42,02,1234.57,1000.00,1.23,1"]
    back = read_report_csv(io.BytesIO(buf.getvalue()))
    assert [(r.state_fips, r.district_id, r.ratio) for r in back] == [
        ("36", "10", 3.0), ("42", "01", 2.5), ("42", "02", 1.23)]


def test_report_csv_empty_and_text_stream():
    buf = io.StringIO()
    write_report_csv([], buf)
    assert buf.getvalue() == ",".join(REPORT_HEADER) + "\r\n"


def test_handley_csv():
    buf = io.BytesIO()
    write_handley_csv([("42", "02", 0.58051, 101), ("42", "01", 1.0, 5)], buf)
    assert buf.getvalue().decode().split("\r\n")[1:3] == ["42,01,1.0000,5", "42,02,0.5805,101"]


# SVG

def svg_tree(text):
    return ET.fromstring(text.encode())


NS = "{http://www.w3.org/2000/svg}"


def test_svg_structure():
    d = rectangle(4_000, 1_000)
    axis = SegmentSet(np.array([[[500, 500], [3500, 500]], [[0, 0], [500, 500]]], float))
    root = svg_tree(render_svg(d, axis, hull=d))
    paths = root.findall(f"{NS}path")
    assert [p.get("class") for p in paths] == ["district", "hull"]
    assert paths[0].get("fill") != "none" and paths[1].get("fill") == "none"
    lines = root.findall(f"{NS}g/{NS}line")
    assert len(lines) == 2
    assert float(lines[0].get("y1")) == -500  # north up
    vb = [float(v) for v in root.get("viewBox").split()]
    assert vb[0] < 0 and vb[0] + vb[2] > 4_000


def test_svg_empty_axis_and_deterministic():
    d = Polygon([[0, 0], [10, 0], [5, 3]])
    a = render_svg(d, SegmentSet.empty())
    assert svg_tree(a).find(f"{NS}g") is None
    assert a == render_svg(Polygon(d.outer.copy()), SegmentSet.empty())
    buf = io.StringIO()
    render_svg(d, SegmentSet.empty(), out=buf)
    assert buf.getvalue() == a
