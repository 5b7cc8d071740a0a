import numpy as np
from scipy.optimize import nnls

from hypcap.capacity import capacity
from hypcap.constellation import Constellation, HyperbolicDisk
from hypcap.optimize import (
    OptimizationProblem,
    OptimizerConfig,
    constraint_jacobian,
    constraint_values,
    fd_gradient,
    minimize,
    pack_params,
    unpack_params,
)

R = [3 / 30, 5 / 30, 7 / 30, 9 / 30]
disks = [HyperbolicDisk(0.5 * np.exp(2j * np.pi * k / 4), R[k - 1]) for k in (1, 2, 3)]
disks.append(HyperbolicDisk(0.5 + 0j, R[3]))
template = Constellation(disks)
problem = OptimizationProblem(
    template,
    [("circle", 0.5), ("circle", 0.5), ("circle", 0.5), "fixed"],
    delta=0.02,
)

res = minimize(problem, OptimizerConfig(tol=1e-5))
x = res.params
print("cap", res.cap, "kkt", res.kkt_residual)

g = constraint_values(problem, x)
jac = constraint_jacobian(problem, x)
print("margins:", np.array2string(g, precision=3))

# FD check of the jacobian at the final point
h = 1e-7
fd = np.zeros_like(jac)
for k in range(x.size):
    e = np.zeros_like(x)
    e[k] = h
    fd[:, k] = (constraint_values(problem, x + e) - constraint_values(problem, x - e)) / (2 * h)
print("jac err:", np.abs(jac - fd).max())

def fun(p):
    return capacity(unpack_params(problem, p), problem.solver).cap

def feasible(p):
    try:
        return bool(constraint_values(problem, p).min() > 0.0)
    except ValueError:
        return False

gf = fd_gradient(fun, x, 1e-6, feasible)
print("grad_f:", gf)
lam, rnorm = nnls(jac.T, gf)
print("lam:", np.array2string(lam, precision=4))
print("stationarity:", np.abs(gf - jac.T @ lam).max(), "max lam*g:", (lam * g).max())

# unconstrained least squares multipliers for comparison
lam_ls, *_ = np.linalg.lstsq(jac.T, gf, rcond=None)
print("lam_ls:", np.array2string(lam_ls, precision=4))
print("ls resid:", np.abs(gf - jac.T @ lam_ls).max())

# capacity monotonicity along the trajectory
caps = [f for _, f in res.trajectory]
inc = max(b - a for a, b in zip(caps, caps[1:]))
print("max increase along trajectory:", inc)
