"""Conformal capacity of unions of hyperbolic disks in the unit disk.

The plate of the condenser is a finite union of closed hyperbolic disks,
the grounded boundary is the unit circle.  The capacity is computed by a
Nystrom discretization of a boundary integral equation on the circular
domain complementary to the disks, and can be minimized over disk
positions under separation constraints.
"""

from .hypgeo import (
    EuclideanDisk,
    HyperbolicDisk,
    MobiusSelfMap,
    euc_to_hyp,
    hyp_area,
    hyp_circle_intersection,
    hyp_circumference,
    hyp_distance,
    hyp_midpoint,
    hyp_to_euc,
)
from .constellation import (
    Constellation,
    RollingPath,
    RollingPathError,
    circle_mounted,
    collinear_chain,
    er_config,
    permutation_family,
    rolling_path,
)
from .bie import BoundaryGrid, CircularDomain, OperatorMatrices, SolverConfig, assemble, build_grid, solve_mu
from .capacity import (
    CapacityResult,
    capacity,
    convergence_study,
    gehring_bound,
    lr_ratio,
    single_disk_capacity,
    upper_bound_sum,
)
from .optimize import (
    OptimizationProblem,
    OptimizationResult,
    OptimizerConfig,
    count_local_minima,
    level_grid,
    minimize,
    multistart,
)

__version__ = "0.1.0"

__all__ = [
    "EuclideanDisk",
    "HyperbolicDisk",
    "MobiusSelfMap",
    "euc_to_hyp",
    "hyp_area",
    "hyp_circle_intersection",
    "hyp_circumference",
    "hyp_distance",
    "hyp_midpoint",
    "hyp_to_euc",
    "Constellation",
    "RollingPath",
    "RollingPathError",
    "circle_mounted",
    "collinear_chain",
    "er_config",
    "permutation_family",
    "rolling_path",
    "BoundaryGrid",
    "CircularDomain",
    "OperatorMatrices",
    "SolverConfig",
    "assemble",
    "build_grid",
    "solve_mu",
    "CapacityResult",
    "capacity",
    "convergence_study",
    "gehring_bound",
    "lr_ratio",
    "single_disk_capacity",
    "upper_bound_sum",
    "OptimizationProblem",
    "OptimizationResult",
    "OptimizerConfig",
    "count_local_minima",
    "level_grid",
    "minimize",
    "multistart",
    "__version__",
]
