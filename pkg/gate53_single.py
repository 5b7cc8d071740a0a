import time

import numpy as np

from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import OptimizationProblem, OptimizerConfig, minimize

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 4), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0.5 + 0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(
    template,
    [("circle", 0.5), ("circle", 0.5), ("circle", 0.5), "fixed"],
    delta=0.02,
)

t0 = time.time()
res = minimize(problem, OptimizerConfig(tol=1e-5))
dt = time.time() - t0
print(f"cap={res.cap:.6f} status={res.status} iters={res.iterations} "
      f"evals={res.evaluations} kkt={res.kkt_residual:.3e} {dt:.1f}s")
caps = [f for _, f in res.trajectory]
print("monotone:", all(b <= a + 1e-12 for a, b in zip(caps, caps[1:])))
print("final angles:", [f"{np.angle(d.center):.4f}" for d in res.configuration.disks[:3]])
