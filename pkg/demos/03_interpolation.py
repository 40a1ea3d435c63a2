"""
IDW and ordinary kriging on scattered wells
===========================================

"""

import numpy as np

from gwvuln import GridHeader, SamplePoint, empirical_variogram, fit_variogram, idw, kriging

rng = np.random.default_rng(4)
geom = GridHeader(ncols=60, nrows=40, xllcorner=0.0, yllcorner=0.0, cellsize=100.0)

# a smooth surface sampled at 35 random locations
xy = rng.uniform(0, 4000, size=(35, 2))
z = 20 + 0.004 * xy[:, 0] + 5 * np.sin(xy[:, 1] / 700)
pts = [SamplePoint(x, y, v) for (x, y), v in zip(xy, z)]

surface_idw = idw(pts, geom, power=2, k=12)

ev = empirical_variogram(pts, n_lags=10)
for h, g, n in zip(ev.lag_centers, ev.semivariance, ev.pair_counts):
    print(f"h={h:7.1f}  gamma={g:7.3f}  pairs={n}")

model = fit_variogram(ev, "spherical")
print(model)
surface_kr = kriging(pts, geom, model)

diff = surface_kr.values - surface_idw.values
print("IDW range   ", surface_idw.values.min().round(2), surface_idw.values.max().round(2))
print("kriging range", surface_kr.values.min().round(2), surface_kr.values.max().round(2))
print("mean |kriging - IDW|", np.abs(diff).mean().round(3))
