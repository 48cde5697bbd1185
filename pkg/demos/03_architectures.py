"""
A tour of the movable-array architectures
=========================================

Every architecture turns a flat parameter vector into an antenna layout.
Here we decode one example of each and check it against the spacing rule.
"""

import numpy as np

from movant import (Box, ElementLocal, FoldableArray, Hinge, RotatableArray, SlidingArray, SubArray,
                    TurnableArray, planar_offsets, validate)
from movant.geometry import segment

lam = 0.1
tile = SubArray(planar_offsets(2, 2, lam / 2))


def show(name, spec, params):
    lay = spec.decode(params)
    ok = "feasible" if validate(lay).ok else "violates spacing"
    print(f"{name:<10} {spec.dimension:>2} params  {len(lay)} elements  {ok}")
    return lay


# %%
# Local movement: each element owns one cell of a split box.
local = ElementLocal(4, Box.centered((4 * lam, 4 * lam, 2 * lam)), lam, grid=(1, 2, 2))
show("local", local, np.mean(local.bounds(), axis=1))

# %%
# Sliding: two 2x2 tiles on parallel rails.
rails = (segment([0, 0, 0], [0, 3 * lam, 0]), segment([0, 0, 2 * lam], [0, 3 * lam, 2 * lam]))
show("sliding", SlidingArray((tile, tile), rails, lam), [0.0, 2 * lam])

# %%
# Rotatable: a quarter turn of roll swaps a horizontal row for a vertical one.
row = SubArray(planar_offsets(1, 4, lam / 2))
rot = RotatableArray(row, lam)
h, v = rot.decode([0.0]), rot.decode([np.pi / 2])
print(f"rotatable  mode H spans {np.ptp(h.positions[:, 1]) / lam:.2f} lambda in y, "
      f"mode V spans {np.ptp(v.positions[:, 2]) / lam:.2f} lambda in z")

# %%
# Turnable: yaw and pitch per tile, rotating about the tile center.
left = SubArray(planar_offsets(2, 2, lam / 2), center=[0, -lam, 0])
right = SubArray(planar_offsets(2, 2, lam / 2), center=[0, lam, 0])
lay = show("turnable", TurnableArray((left, right), lam), [0.5, 0.0, -0.5, 0.0])
print("  boresights:", np.round(lay.rotations[[0, 4], :, 0], 3).tolist())

# %%
# Foldable: a wing folding about a vertical hinge at the panel edge.
wing = SubArray(np.array([[0, lam * (0.75 + 0.5 * k), 0] for k in range(2)]))
fold = FoldableArray((wing,), (Hinge([0, lam / 2, 0], [0, 0, 1]),), lam,
                     fixed=SubArray(planar_offsets(1, 2, lam / 2)))
for a in (0.0, np.pi / 4, np.pi / 2):
    p = fold.decode([a]).positions
    print(f"foldable   angle {np.degrees(a):4.0f} deg  wing tip at {np.round(p[-1] / lam, 3)} lambda")
