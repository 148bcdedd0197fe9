"""CSV reports and SVG overlays."""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from ..geometry import MultiPolygon, SegmentSet
from ..metrics import RatioReport

__all__ = ["REPORT_HEADER", "HANDLEY_HEADER", "write_report_csv", "read_report_csv",
           "write_handley_csv", "render_svg"]

REPORT_HEADER = ["STATEFP", "CD115FP", "Medial", "Hull", "Ratio", "Category"]
HANDLEY_HEADER = ["STATEFP", "CD115FP", "Mu", "SeedCount"]


def _emit(out, text: str) -> None:
    if isinstance(out, io.TextIOBase):
        out.write(text)
    else:
        out.write(text.encode("utf-8"))


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)  # RFC 4180: CRLF line ends, minimal quoting
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_report_csv(reports, out) -> None:
    """Ratio reports sorted by (STATEFP, CD115FP); lengths and ratio to 2 decimals."""
    rows = [[r.state_fips, r.district_id, f"{r.medial_length:.2f}", f"{r.hull_length:.2f}",
             f"{r.ratio:.2f}", str(r.category)]
            for r in sorted(reports, key=lambda r: (r.state_fips, r.district_id))]
    _emit(out, _table(REPORT_HEADER, rows))


def read_report_csv(stream) -> list[RatioReport]:
    raw = stream.read()
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    rows = list(csv.DictReader(io.StringIO(text, newline="")))
    return [RatioReport(r["STATEFP"], r["CD115FP"], float(r["Medial"]), float(r["Hull"]),
                        float(r["Ratio"]), int(r["Category"])) for r in rows]


def write_handley_csv(rows, out) -> None:
    """``rows``: ``(statefp, cd115fp, mu, seed_count)`` tuples."""
    body = [[s, d, f"{mu:.4f}", str(n)] for s, d, mu, n in sorted(rows, key=lambda r: (r[0], r[1]))]
    _emit(out, _table(HANDLEY_HEADER, body))


def _path(geom: MultiPolygon, fmt) -> str:
    cmds = []
    for ring in geom.rings:
        pts = " L ".join(f"{fmt(x)} {fmt(-y)}" for x, y in ring)
        cmds.append(f"M {pts} Z")
    return " ".join(cmds)


def render_svg(district, medial: SegmentSet, hull=None, out=None) -> str:
    """District fill, axis strokes and an optional hull outline as SVG.

    The y axis is flipped so north is up.  Output depends only on the
    inputs; the text is returned and also written to ``out`` if given.
    """
    d = MultiPolygon.of(district)
    h = MultiPolygon.of(hull) if hull is not None else None
    pts = [np.vstack(d.rings)]
    if h is not None:
        pts.append(np.vstack(h.rings))
    if len(medial):
        pts.append(medial.segments.reshape(-1, 2))
    allp = np.vstack(pts)
    x0, y0 = allp.min(axis=0)
    x1, y1 = allp.max(axis=0)
    w, ht = x1 - x0, y1 - y0
    size = max(w, ht)
    mx, my = 0.02 * (w or size), 0.02 * (ht or size)
    decimals = max(2, 4 - int(math.floor(math.log10(size)))) if size > 0 else 2

    def fmt(v):
        s = f"{v:.{decimals}f}"
        return "0" if float(s) == 0 else s

    stroke = fmt(size / 400)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{fmt(x0 - mx)} {fmt(-y1 - my)} {fmt(w + 2 * mx)} {fmt(ht + 2 * my)}">',
        f'<path class="district" fill="#c6dbef" fill-rule="evenodd" stroke="#3182bd" '
        f'stroke-width="{stroke}" d="{_path(d, fmt)}"/>',
    ]
    if h is not None:
        lines.append(f'<path class="hull" fill="none" stroke="#636363" stroke-width="{stroke}" '
                     f'stroke-dasharray="{fmt(size / 100)}" d="{_path(h, fmt)}"/>')
    if len(medial):
        lines.append(f'<g class="axis" stroke="#e6550d" stroke-width="{stroke}">')
        for (ax, ay), (bx, by) in medial.segments:
            lines.append(f'<line x1="{fmt(ax)}" y1="{fmt(-ay)}" x2="{fmt(bx)}" y2="{fmt(-by)}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if out is not None:
        _emit(out, text)
    return text
