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
print("best cap", f"{results[0].cap:.6f}", flush=True)

sub = OptimizationProblem(best, ["free", "fixed", "fixed", "fixed"], delta=0.02)

for span in (0.5, 0.55, 0.6):
    for res in (13, 15, 17, 19, 21, 25, 31):
        t0 = time.time()
        g = level_grid(sub, (-span, span), (-span, span), res)
        n = count_local_minima(g.values)
        print(f"span={span} res={res}: {n} basins ({time.time()-t0:.0f}s)", flush=True)
