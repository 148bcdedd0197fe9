# %% [markdown]
# Axis length on the two textbook shapes.
#
# A rectangle's medial axis is a central spine plus four 45-degree
# diagonals; pruning the 200 m buffer trims each diagonal tip.  A circle's
# exact axis is a single point, but with the default 500 m simplification
# the 360-gon turns into a polygon of a dozen or so sides, and every corner
# of that polygon grows a real spoke.

# %%
import math

from medialhull.medial import PipelineParams, approximate_medial_axis
from medialhull.shapes import rectangle, regular_polygon

# %%
W, H, buf = 40_000.0, 10_000.0, 200.0
exact = (W - H) + 2 * math.sqrt(2) * H
pruned = exact - 4 * math.sqrt(2) * buf
for k in (5, 10, 20, 40):
    p = PipelineParams(buffer=buf, simplify_tolerance=0, densify_k=k)
    length = approximate_medial_axis(rectangle(W, H), p).length
    print(f"densify {k:2d}: {length:9.1f} m  ({100 * (length / pruned - 1):+.1f}% vs pruned formula)")
print(f"exact {exact:.1f} m, pruned formula {pruned:.1f} m")

# %% [markdown]
# Fixed parameters penalize small districts: the same 200 m buffer eats a
# larger share of a smaller rectangle's axis.

# %%
p = PipelineParams(simplify_tolerance=0, densify_k=20)
for s in (1.0, 0.5, 0.2, 0.1):
    length = approximate_medial_axis(rectangle(W * s, H * s), p).length
    print(f"scale {s:4.1f}: error vs exact {100 * (1 - length / (s * exact)):5.1f}%")

# %% [markdown]
# The circle, with and without simplification.

# %%
disk = regular_polygon(360, 10_000)
for simplify, k in ((500, 10), (0, 10), (0, 0)):
    axis = approximate_medial_axis(disk, PipelineParams(simplify_tolerance=simplify, densify_k=k))
    print(f"simplify {simplify:3d}, densify {k:2d}: {len(axis):5d} segments, {axis.length:12.1f} m")
