import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import OptimizationProblem, OptimizerConfig, minimize, multistart

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 3), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(template, ["free", "free", "free", "fixed"], delta=0.02)

t0 = time.time()
res = minimize(problem, OptimizerConfig(tol=1e-5))
print(f"single: cap={res.cap:.6f} status={res.status} iters={res.iterations} "
      f"kkt={res.kkt_residual:.2e} {time.time()-t0:.0f}s")
caps = [f for _, f in res.trajectory]
print("monotone within 1e-8:", all(b <= a + 1e-8 * (1 + abs(a)) for a, b in zip(caps, caps[1:])))

t0 = time.time()
results = multistart(problem, 5, OptimizerConfig(tol=1e-5, seed=7), jobs=1)
print(f"multistart k=5: {len(results)} distinct in {time.time()-t0:.0f}s")
for r in results:
    print(f"  cap={r.cap:.6f} status={r.status} kkt={r.kkt_residual:.2e}")
print("best within 5e-4 of 4.2322:", abs(results[0].cap - 4.2322) <= 5e-4)
