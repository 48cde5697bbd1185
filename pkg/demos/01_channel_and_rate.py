"""
Channels, zero forcing and what moving an antenna buys
======================================================

A four-antenna base station serves four single-antenna users over a
five-path geometric channel. We compare a fixed 2x2 half-wavelength array
with a layout found by moving every element inside a 4 x 4 x 2 wavelength box.
"""

import numpy as np

from movant import (AntennaLayout, Box, ElementGlobal, FixedArray, ScenarioConfig, bo_run, build_channel,
                    generate_scenario, planar_offsets, sum_rate, sum_rate_objective)
from movant.precoding import db_to_linear

lam = 0.1                                   # 3 GHz, in metres
sc = generate_scenario(ScenarioConfig(n_users=4, n_paths=5, wavelength=lam), seed=3)
print(f"{sc.n_users} users, {len(sc.users[0])} paths each")

# %%
# The fixed array sits in the y-z plane, broadside along +x.
fpa = FixedArray(planar_offsets(2, 2, lam / 2), lam).decode()
snr = db_to_linear(5.0)
base = sum_rate(build_channel(fpa, sc), snr)
print("fixed array, per-user rates:", np.round(base.rates, 3), "sum", round(base.sum_rate, 3))

# %%
# Fading along one axis: a single antenna sweeping one wavelength sees the
# paths add and cancel.
xs = np.linspace(0, lam, 11)
single = ScenarioConfig(n_users=1, n_paths=5, wavelength=lam)
one = generate_scenario(single, seed=0)
gain_db = [20 * np.log10(abs(build_channel(AntennaLayout.from_euler([[x, 0, 0]], wavelength=lam), one)[0, 0]))
           for x in xs]
for x, g in zip(xs, gain_db):
    print(f"  x = {x / lam:4.1f} lambda   |h| = {g:6.2f} dB")

# %%
# A compact half-wavelength array often sees users whose channels are
# nearly parallel, and zero forcing then pays heavily in power. Now let
# every element roam the box. The optimiser starts from the fixed
# layout so it can never do worse.
spec = ElementGlobal(4, Box.centered((4 * lam, 4 * lam, 2 * lam)), lam)
obj = sum_rate_objective(spec, sc, snr)
res = bo_run(obj, 60, seed=3, warm_start=[spec.encode(fpa)])
moved = spec.decode(res.best_params)
print(f"after {res.evaluations} evaluations: sum rate {res.best_score:.3f} "
      f"({res.best_score / base.sum_rate:.2f}x the fixed array)")
print("element positions in wavelengths:\n", np.round(moved.positions / lam, 2))
