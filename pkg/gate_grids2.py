import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    count_local_minima,
    level_grid,
    multistart,
)

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)
results = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7))
best = results[0].configuration
print("best cap", f"{results[0].cap:.6f}")

sub = OptimizationProblem(best, ["free", "fixed", "fixed", "fixed"], delta=0.02)


def minima_cells(grid):
    v = grid.values
    ny, nx = v.shape
    cells = []
    for iy in range(ny):
        for ix in range(nx):
            c = v[iy, ix]
            if not np.isfinite(c):
                continue
            neigh = v[max(0, iy - 1) : iy + 2, max(0, ix - 1) : ix + 2]
            others = neigh[np.isfinite(neigh)]
            if (others < c).sum() == 0 and (others == c).sum() == 1:
                cells.append((grid.xs[ix], grid.ys[iy], c))
    return cells


for res, span in ((41, 0.8), (61, 0.8), (41, 0.55)):
    t0 = time.time()
    g = level_grid(sub, (-span, span), (-span, span), res)
    n = count_local_minima(g.values)
    cells = minima_cells(g)
    print(f"res={res} span={span}: {n} basins ({time.time()-t0:.0f}s)")
    for x, y, c in sorted(cells, key=lambda t: t[2]):
        print(f"   ({x:+.3f},{y:+.3f}) u={c:.6f}")
