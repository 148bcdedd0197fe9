# %% [markdown]
# A whole-state run through the command line.
#
# We build a toy state out of seven districts: four plain blocks, a C wrapped
# around one of them, a pinwheel, and a filler district with the pinwheel cut
# out of it.  The state outline is the union of the districts, so the
# district file can double as the state file, just as with a TIGER/Line
# download of all of a state's districts.  Without the filler the pinwheel
# would sit at the state's edge and its state-clipped hull would be itself.

# %%
import subprocess
import sys
import tempfile
from pathlib import Path

from medialhull.geometry import Polygon
from medialhull.gis import Feature, write_geojson
from medialhull.shapes import c_shape, rectangle, spiral_district

# %%
spiral = spiral_district().transformed(lambda r: r + [150_000, 30_000])
districts = {
    "01": rectangle(60_000, 60_000, 0, 0),
    "02": rectangle(60_000, 60_000, 0, 60_000),
    "03": c_shape(60_000, 60_000, 12_000).transformed(lambda r: r + [60_000, 0]),
    "04": rectangle(48_000, 36_000, 72_000, 12_000),
    "05": rectangle(60_000, 60_000, 60_000, 60_000),
    "06": spiral,
    "07": Polygon(rectangle(70_000, 80_000, 120_000, -10_000).outer, (spiral.outer,)),
}
feats = [Feature(g, {"STATEFP": "99", "CD115FP": cd}) for cd, g in districts.items()]
work = Path(tempfile.mkdtemp(prefix="medialhull-demo-"))
path = work / "districts.geojson"
with path.open("wb") as f:
    write_geojson(feats, f)


def cli(*args):
    cmd = [sys.executable, "-m", "medialhull", *map(str, args)]
    res = subprocess.run(cmd, capture_output=True, text=True)
    print("$ medialhull", " ".join(map(str, args)), f"  (exit {res.returncode})")
    print(res.stdout, res.stderr, sep="")


# %%
cli("state-report", "--district", path, "--state", path, "--out", work / "ratios.csv", "--jobs", 2)
print((work / "ratios.csv").read_text())

# %%
cli("handley", "--district", path)

# %%
cli("render", "--district", path, "--state", path, "--svg-dir", work / "svg", "--only", "03,06")
print(sorted(p.name for p in (work / "svg").iterdir()), "in", work)
