# %% [markdown]
# A pinwheel district: round core, three curled arms.
#
# The medial-hull ratio sees the arms and lands in category 4.  Handley's
# meanderingness only asks how much of the district one point can see,
# and the core alone is more than half the area, so it still reports a
# fairly compact shape.

# %%
from pathlib import Path

from medialhull.geometry import signed_area
from medialhull.gis import render_svg
from medialhull.handley import SeedSampling, coverage_polygon, meanderingness
from medialhull.medial import approximate_medial_axis, clipped_hull
from medialhull.metrics import medial_hull_ratio
from medialhull.shapes import rectangle, spiral_district

# %%
state = rectangle(200_000, 200_000, -100_000, -100_000)
sp = spiral_district()
r = medial_hull_ratio(sp, state)
print(f"area {sp.area / 1e6:.0f} km2, medial {r.medial_length:.0f} m, hull {r.hull_length:.0f} m")
print(f"ratio {r.ratio:.2f}, category {r.category}")

# %%
rep = meanderingness(sp)
best = rep.best
print(f"mu {rep.mu:.3f} from {len(rep.seed_results)} seeds, "
      f"best seed ({best.seed[0]:.0f}, {best.seed[1]:.0f})")
core = abs(signed_area(coverage_polygon((0.0, 0.0), sp))) / sp.area
print(f"the core center alone sees {100 * core:.0f}% of the district")

# %% [markdown]
# Adding arms does not make either score more damning: each extra arm also
# widens the hull, so the ratio drops, while the core keeps mu near 0.58.

# %%
for arms in (3, 4, 5):
    d = spiral_district(arms=arms)
    print(f"{arms} arms: ratio {medial_hull_ratio(d, state).ratio:.2f}, "
          f"mu {meanderingness(d, SeedSampling.grid()).mu:.3f}")

# %%
out = Path("spiral.svg")
with out.open("w") as f:
    render_svg(sp, approximate_medial_axis(sp), clipped_hull(sp, state), f)
print(f"wrote {out}")
