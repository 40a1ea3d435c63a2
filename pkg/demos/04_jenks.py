"""
Natural breaks on a vulnerability index
=======================================

"""

import numpy as np

from gwvuln import Grid, GridHeader, classify, jenks_breaks
from gwvuln.classification import within_class_ssd

v = np.array([1, 2, 3, 10, 11, 12], dtype=float)
cb = jenks_breaks(v, 2)
print(cb.breaks, within_class_ssd(v, cb.breaks))

# three clumps plus noise; k=3 should find the gaps
rng = np.random.default_rng(1)
vals = np.concatenate([rng.normal(mu, 3, 300) for mu in (80, 120, 170)]).round()
h = GridHeader(30, 30, 0, 0, 1)
g = Grid(h, vals)
cb = jenks_breaks(g.valid_values(), 3)
print(cb.breaks, cb.labels)
classes = classify(g, cb)
print(np.bincount(classes.valid_values().astype(int))[1:])

# positive rescaling does not move any cell between classes
g2 = Grid(h, vals / 25.0 + 3)
same = classify(g2, jenks_breaks(g2.valid_values(), 3)) == classes
print("same classes after rescaling:", same)
