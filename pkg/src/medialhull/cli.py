"""Command line driver: ``medialhull {ratio,state-report,handley,render}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MedialHullError
from .geometry import MultiPolygon, Polygon
from .gis import (Feature, UtmZoneSpec, project_to_utm, read_geojson, read_shapefile,
                  render_svg, write_handley_csv, write_report_csv, zone_for)
from .handley import SeedSampling, _check_step, meanderingness
from .medial import PipelineParams, approximate_medial_axis, clipped_hull
from .metrics import category_counts, medial_hull_ratio, statewide_average

log = logging.getLogger("medialhull")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    district_path: Path
    state_path: Path | None = None
    fmt: str | None = None
    zone: str = "auto"
    params: PipelineParams = field(default_factory=PipelineParams)
    out: Path | None = None
    svg_dir: Path | None = None
    only: tuple = ()
    jobs: int = 1


@dataclass(frozen=True)
class District:
    statefp: str
    cd: str
    geometry: MultiPolygon

    @property
    def key(self):
        return (self.statefp, self.cd)

    @property
    def label(self):
        return f"{self.statefp}-{self.cd}" if self.statefp else self.cd


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _guess_format(path: Path) -> str:
    return "shapefile" if path.suffix.lower() in (".shp", ".dbf") else "geojson"


def read_features(path: Path, fmt: str | None = None) -> list[Feature]:
    fmt = fmt or _guess_format(path)
    if fmt == "geojson":
        with open(path, "rb") as f:
            return read_geojson(f)
    shp = path.with_suffix(".shp")
    dbf = path.with_suffix(".dbf")
    with open(shp, "rb") as s:
        if dbf.exists():
            with open(dbf, "rb") as d:
                return read_shapefile(s, d)
        return read_shapefile(s)


def dissolve(features: list[Feature]) -> MultiPolygon:
    """Union of all feature geometries (the state outline from its districts)."""
    geoms = [f.geometry for f in features]
    if len(geoms) == 1:
        return geoms[0]
    import shapely
    from shapely.geometry import MultiPolygon as SMulti, Polygon as SPoly

    shapes = [SPoly(p.outer, p.holes) for g in geoms for p in g.parts]
    u = shapely.unary_union(shapes)
    parts = u.geoms if isinstance(u, SMulti) else [u]
    return MultiPolygon(tuple(
        Polygon(np.asarray(p.exterior.coords), tuple(np.asarray(i.coords) for i in p.interiors))
        for p in parts if not p.is_empty))


def _district_id(props: dict, index: int) -> str:
    if "CD115FP" in props:
        return props["CD115FP"]
    for k in sorted(props):
        if k.startswith("CD") and k.endswith("FP"):
            return props[k]
    return f"{index + 1:02d}"


def _pick_zone(spec: str, anchor: Feature) -> UtmZoneSpec:
    if spec == "auto":
        return zone_for(*anchor.geometry_centroid())
    return UtmZoneSpec.parse(spec)


def load(cfg: RunConfig):
    """Districts and state outline in a common planar CRS."""
    districts = read_features(cfg.district_path, cfg.fmt)
    state_feats = read_features(cfg.state_path, cfg.fmt) if cfg.state_path else None
    if not districts:
        raise MedialHullError("district file holds no features")
    state = dissolve(state_feats) if state_feats else None
    geographic = districts[0].geographic
    if any(f.geographic != geographic for f in districts + (state_feats or [])):
        raise MedialHullError("district and state files mix lon/lat and projected coordinates")
    zone = None
    if geographic:
        anchor = Feature(state, {}, True) if state is not None else Feature(
            MultiPolygon(tuple(p for f in districts for p in f.geometry.parts)), {}, True)
        zone = _pick_zone(cfg.zone, anchor)
        districts = [project_to_utm(f, zone) for f in districts]
        if state is not None:
            state = project_to_utm(Feature(state, {}, True), zone).geometry
    elif cfg.zone != "auto":
        log.warning("input is already projected; ignoring --zone %s", cfg.zone)
    out = [District(f.statefp, _district_id(f.properties, i), f.geometry)
           for i, f in enumerate(districts)]
    if cfg.only:
        wanted = set(cfg.only)
        out = [d for d in out if d.cd in wanted]
    out.sort(key=lambda d: d.key)
    return out, state, zone


# ---------------------------------------------------------------------------
# Work units
# ---------------------------------------------------------------------------

def _ratio_task(args):
    d, state, params = args
    t0 = time.perf_counter()
    try:
        rep = medial_hull_ratio(d.geometry, state, params, d.statefp, d.cd)
        return d.key, rep, None, time.perf_counter() - t0
    except (MedialHullError, ValueError) as e:
        return d.key, None, f"{type(e).__name__}: {e}", time.perf_counter() - t0


def _handley_task(args):
    d, sampling, step = args
    t0 = time.perf_counter()
    try:
        rep = meanderingness(d.geometry, sampling, step)
        return d.key, (d.statefp, d.cd, rep.mu, len(rep.seed_results)), None, \
            time.perf_counter() - t0
    except (MedialHullError, ValueError) as e:
        return d.key, None, f"{type(e).__name__}: {e}", time.perf_counter() - t0


def _render_task(args):
    d, state, params, path = args
    t0 = time.perf_counter()
    try:
        hull = clipped_hull(d.geometry, state)
        axis = approximate_medial_axis(d.geometry, params)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            render_svg(d.geometry, axis, hull, f)
        return d.key, str(path), None, time.perf_counter() - t0
    except (MedialHullError, ValueError) as e:
        return d.key, None, f"{type(e).__name__}: {e}", time.perf_counter() - t0


def run_pool(fn, tasks, jobs: int, labels: dict):
    """Run ``fn`` over ``tasks``; results come back ordered by district key."""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, tasks))
    else:
        results = [fn(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    ok, failed = [], []
    for key, value, err, dt in results:
        if err is None:
            log.info("district %s done in %.2f s", labels[key], dt)
            ok.append(value)
        else:
            log.error("district %s failed after %.2f s: %s", labels[key], dt, err)
            failed.append((key, err))
    return ok, failed


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _header(cfg: RunConfig, zone) -> str:
    p = cfg.params
    return (f"# medialhull {__version__} buffer={p.buffer:g} simplify={p.simplify_tolerance:g} "
            f"densify={p.densify_k} zone={zone if zone else 'planar'}")


def _open_out(path: Path | None):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _ratios(cfg: RunConfig):
    if cfg.state_path is None:
        raise UsageError("--state is required")
    districts, state, zone = load(cfg)
    if not districts:
        raise MedialHullError("no districts selected")
    log.info(_header(cfg, zone))
    labels = {d.key: d.label for d in districts}
    reports, failed = run_pool(_ratio_task, [(d, state, cfg.params) for d in districts],
                               cfg.jobs, labels)
    return reports, failed, zone


def cmd_ratio(cfg: RunConfig) -> int:
    reports, failed, _ = _ratios(cfg)
    out = _open_out(cfg.out)
    try:
        write_report_csv(reports, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_DATA if failed else EXIT_OK


def cmd_state_report(cfg: RunConfig) -> int:
    reports, failed, zone = _ratios(cfg)
    out = _open_out(cfg.out)
    try:
        write_report_csv(reports, out)
    finally:
        if out is not sys.stdout:
            out.close()
    summary = sys.stdout if cfg.out is not None else sys.stderr
    print(_header(cfg, zone), file=summary)
    if reports:
        mean, cat = statewide_average(reports)
        counts = category_counts(reports)
        print(f"districts={len(reports)} mean_ratio={mean:.2f} category={cat} "
              + " ".join(f"cat{c}={n}" for c, n in counts.items()), file=summary)
    return EXIT_DATA if failed or not reports else EXIT_OK


def cmd_handley(cfg: RunConfig, step_degrees: float, sampling: SeedSampling) -> int:
    _check_step(step_degrees)
    districts, _, zone = load(cfg)
    if not districts:
        raise MedialHullError("no districts selected")
    log.info("%s step=%g", _header(cfg, zone), step_degrees)
    labels = {d.key: d.label for d in districts}
    rows, failed = run_pool(_handley_task, [(d, sampling, step_degrees) for d in districts],
                            cfg.jobs, labels)
    out = _open_out(cfg.out)
    try:
        write_handley_csv(rows, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_DATA if failed else EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    if cfg.svg_dir is None:
        raise UsageError("--svg-dir is required")
    try:
        cfg.svg_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"cannot create {cfg.svg_dir}: {e.strerror}") from None
    if not os.access(cfg.svg_dir, os.W_OK):
        raise UsageError(f"{cfg.svg_dir} is not writable")
    districts, state, zone = load(cfg)
    if not districts:
        raise MedialHullError("no districts selected")
    log.info(_header(cfg, zone))
    multi_state = len({d.statefp for d in districts}) > 1
    tasks = []
    for d in districts:
        name = f"{d.statefp}_{d.cd}.svg" if multi_state else f"{d.cd}.svg"
        tasks.append((d, state, cfg.params, cfg.svg_dir / name))
    labels = {d.key: d.label for d in districts}
    _, failed = run_pool(_render_task, tasks, cfg.jobs, labels)
    return EXIT_DATA if failed else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _zone(text):
    if text == "auto":
        return text
    try:
        UtmZoneSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--district", required=True, type=Path, help="district file")
    common.add_argument("--state", type=Path, help="state outline, or all districts of the state")
    common.add_argument("--format", choices=("geojson", "shapefile"), dest="fmt",
                        help="input format (default: from the file extension)")
    common.add_argument("--zone", default="auto", type=_zone,
                        help="UTM zone such as 18N, or auto (zone of the state centroid)")
    common.add_argument("--buffer", type=float, default=200.0, help="meters (default 200)")
    common.add_argument("--simplify", type=float, default=500.0, help="meters (default 500)")
    common.add_argument("--densify", type=int, default=10, help="points per segment (default 10)")
    common.add_argument("--out", type=Path, help="CSV output (default stdout)")
    common.add_argument("--only", default="", help="comma-separated CD115FP codes")
    common.add_argument("--jobs", type=_positive_int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="medialhull", description=__doc__)
    p.add_argument("--version", action="version", version=f"medialhull {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("ratio", parents=[common], help="medial-hull ratio per district")
    sub.add_parser("state-report", parents=[common], help="ratios plus the statewide summary")
    h = sub.add_parser("handley", parents=[common], help="Handley meanderingness per district")
    h.add_argument("--step-degrees", type=float, default=5.0)
    h.add_argument("--seed-grid", type=float, help="seed grid spacing in meters")
    r = sub.add_parser("render", parents=[common], help="SVG overlay per district")
    r.add_argument("--svg-dir", type=Path, required=True)
    return p


def config_from_args(ns) -> RunConfig:
    try:
        params = PipelineParams(buffer=ns.buffer, simplify_tolerance=ns.simplify,
                                densify_k=ns.densify)
    except ValueError as e:
        raise UsageError(str(e)) from None
    for path in (ns.district, ns.state):
        if path is not None and not path.exists() and not path.with_suffix(".shp").exists():
            raise UsageError(f"cannot read {path}")
    only = tuple(c.strip() for c in ns.only.split(",") if c.strip())
    return RunConfig(ns.district, ns.state, ns.fmt, ns.zone, params, ns.out,
                     getattr(ns, "svg_dir", None), only, ns.jobs)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    log.setLevel(logging.INFO)
    try:
        cfg = config_from_args(ns)
        if ns.command == "ratio":
            return cmd_ratio(cfg)
        if ns.command == "state-report":
            return cmd_state_report(cfg)
        if ns.command == "handley":
            try:
                _check_step(ns.step_degrees)
                sampling = SeedSampling.grid(ns.seed_grid)
            except ValueError as e:
                raise UsageError(str(e)) from None
            return cmd_handley(cfg, ns.step_degrees, sampling)
        return cmd_render(cfg)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"medialhull: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"medialhull: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MedialHullError as e:
        print(f"medialhull: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
