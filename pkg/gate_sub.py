import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
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
t0 = time.time()
subres = multistart(sub, 20, OptimizerConfig(tol=1e-5, seed=3))
print(f"small-disk multistart k=20: {len(subres)} distinct ({time.time()-t0:.0f}s)")
for r in subres:
    z = r.configuration.centers[0]
    print(f"  cap={r.cap:.6f} z0={z:.4f} status={r.status} kkt={r.kkt_residual:.2e}")
