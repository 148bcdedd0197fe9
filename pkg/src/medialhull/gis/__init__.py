"""Reading district files, projecting them to UTM, and writing results."""

from .feature import Feature
from .geojson import read_geojson, write_geojson
from .projection import UtmZoneSpec, project_to_utm, utm_forward, utm_inverse, zone_for
from .report import read_report_csv, render_svg, write_handley_csv, write_report_csv
from .shapefile import read_dbf, read_shapefile

__all__ = ["Feature", "read_geojson", "write_geojson", "read_shapefile", "read_dbf",
           "UtmZoneSpec", "project_to_utm", "utm_forward", "utm_inverse", "zone_for",
           "write_report_csv", "read_report_csv", "write_handley_csv", "render_svg"]
