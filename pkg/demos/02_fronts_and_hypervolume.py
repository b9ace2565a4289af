"""
Non-dominated sorting and hypervolume
=====================================

Rank random objective vectors into fronts, then measure how much of the
unit cube the first front covers.
"""
import numpy as np

from infmax import hypervolume
from infmax.moea import crowding_distance, fast_nondominated_sort

rng = np.random.default_rng(0)
points = rng.random((40, 3))

fronts = fast_nondominated_sort(points)
print("front sizes:", [len(f) for f in fronts])

best = points[fronts[0]]
print("crowding of the first front:", np.round(crowding_distance(best), 3))

# the covered volume can only grow as points are added
for m in (2, 3, 4, 6):
    P = rng.random((25, m)) ** (1 / m)
    print(f"m={m}: hypervolume of 25 points = {hypervolume(P):.4f}")

# a single point covers the box it spans
print(hypervolume([[0.5, 0.4, 0.3]]), 0.5 * 0.4 * 0.3)
