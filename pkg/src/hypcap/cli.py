"""Command line driver for the capacity experiments.

Each subcommand reproduces one experiment family: single capacity
evaluations, sweeps of a geometric parameter (chain gap, spacing of
disks on a circle, rolling-disk position), capacity level grids over one
mobile disk, constrained minimization of the capacity, equal-radius
lower-bound tables, the twelve four-disk permutation classes, and
grid-refinement studies.  Results are written as CSV or JSON in full
double precision together with a sidecar metadata file recording the
solver settings, so reruns with the same flags are byte-identical.

Constellation input files are JSON:

    {"geometry": "hyperbolic" | "euclidean", "delta": 0.02,
     "disks": [{"center": [x, y], "radius": r}, ...], "label": "..."}

Euclidean-geometry disks are converted to hyperbolic ones on load.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import __version__
from .bie import ConfigurationError, IterativeSolveError, SolverConfig
from .capacity import InfeasibleError, capacity, convergence_study, gehring_bound
from .constellation import (
    Constellation,
    RollingPathError,
    _angle_step,
    circle_mounted,
    collinear_chain,
    er_config,
    permutation_family,
    rolling_path,
    validate,
)
from .hypgeo import hyp_distance
from .optimize import (
    InfeasibleStartError,
    OptimizationProblem,
    OptimizerConfig,
    count_local_minima,
    level_grid,
    multistart,
)

__all__ = ["main", "load_constellation", "write_table"]

_DOMAIN_ERRORS = (
    InfeasibleError,
    InfeasibleStartError,
    RollingPathError,
    ConfigurationError,
    IterativeSolveError,
    ValueError,
)


def load_constellation(path: str | Path) -> Constellation:
    """Read a constellation JSON file, convert geometry, and check disjointness."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"malformed JSON in {path}: {exc}")
    if not isinstance(data, dict):
        raise click.ClickException(f"malformed constellation file {path}: expected a JSON object")
    try:
        c = Constellation.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise click.ClickException(f"bad constellation file {path}: {exc}")
    # the capacity problem needs disjoint closed disks; delta-separation is
    # an optimizer constraint, not a file-validity requirement
    bad = validate(c, delta=0.0)
    if bad:
        worst = ", ".join(f"disks ({v.i},{v.j}) with boundary gap {v.margin:.6g}" for v in bad)
        raise click.ClickException(f"infeasible constellation in {path}: {worst}")
    return c


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    return format(v, ".17g")


def write_table(rows, path: str | Path, header) -> None:
    """CSV with header, 17 significant digits, LF endings, '.' decimal point."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_sidecar(output: Path, config: SolverConfig, delta: float | None) -> None:
    alpha = config.alpha
    meta = {
        "n": config.n,
        "alpha": alpha if isinstance(alpha, (str, type(None))) else [alpha.real, alpha.imag],
        "mode": config.mode,
        "delta": delta,
        "version": __version__,
    }
    sidecar = output.with_name(output.name + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_alpha(text: str) -> complex | str:
    text = text.strip()
    if text.lower() == "auto":
        return "auto"
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigurationError(f"alpha must be 're,im' or 'auto', got {text!r}")
    return complex(float(parts[0]), float(parts[1]))


def _solver_config(n: int, alpha: str, mode: str, oversample: str) -> SolverConfig:
    try:
        q = None if oversample.strip().lower() == "auto" else int(oversample)
        return SolverConfig(n=n, alpha=_parse_alpha(alpha), mode=mode, quad_oversample=q)
    except (ConfigurationError, ValueError) as exc:
        raise click.ClickException(str(exc))


def _solver_options(oversample_default: str = "auto"):
    def deco(f):
        f = click.option(
            "--oversample",
            default=oversample_default,
            show_default=True,
            help="quadrature oversampling factor: an integer or 'auto'",
        )(f)
        f = click.option(
            "--mode",
            type=click.Choice(["direct", "iterative"]),
            default="direct",
            show_default=True,
            help="linear solver for the integral equation",
        )(f)
        f = click.option(
            "--alpha",
            default="auto",
            show_default=True,
            help="kernel base point 're,im', or 'auto' for the max-margin point",
        )(f)
        f = click.option(
            "--n",
            type=int,
            default=128,
            show_default=True,
            help="quadrature nodes per boundary circle",
        )(f)
        return f

    return deco


_jobs_option = click.option(
    "--jobs", type=int, default=1, show_default=True, help="worker threads for independent evaluations"
)
_output_option = click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="output file path",
)
_input_argument = click.argument(
    "input", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)


def _pmap(fn, items, jobs: int) -> list:
    # pool.map preserves input order, so assembly is deterministic
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _guard(fn):
    try:
        return fn()
    except click.ClickException:
        raise
    except _DOMAIN_ERRORS as exc:
        raise click.ClickException(str(exc))


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise click.ClickException(f"bad {what}: {exc}")
    if not values:
        raise click.ClickException(f"{what} must be a nonempty comma list")
    return values


def _parse_mobility(text: str) -> tuple:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part.startswith("circle:"):
            try:
                out.append(("circle", float(part[len("circle:"):])))
            except ValueError as exc:
                raise click.ClickException(f"bad mobility entry {part!r}: {exc}")
        else:
            out.append(part)
    return tuple(out)


@click.group()
@click.version_option(version=__version__, prog_name="hypcap")
def main() -> None:
    """Capacity of unions of hyperbolic disks in the unit disk.

    Subcommands evaluate the capacity of a disk configuration, sweep
    geometric parameters, scan level grids, minimize the capacity over
    disk positions, and tabulate bounds.  File-writing commands also
    write '<output>.meta.json' recording the solver settings.
    """


@main.command()
@_input_argument
@_solver_options()
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="write the result JSON here instead of stdout",
)
def cap(input: Path, n: int, alpha: str, mode: str, oversample: str, output: Path | None) -> None:
    """Capacity of the constellation in the INPUT file."""
    config = _solver_config(n, alpha, mode, oversample)
    c = load_constellation(input)
    result = _guard(lambda: capacity(c, config))
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if output is None:
        click.echo(payload)
    else:
        output.write_text(payload + "\n", encoding="utf-8")
        _write_sidecar(output, config, c.delta)
        click.echo(f"cap = {_fmt(result.cap)}")
        click.echo(f"wrote {output}")


@main.command("sweep-collinear")
@click.option("--radii", required=True, help="comma list of hyperbolic radii, chain order")
@click.option("--anchor", type=int, default=0, show_default=True, help="index of the disk pinned at the origin")
@click.option("--d-list", default=None, help="comma list of gap values d")
@click.option("--d-min", type=float, default=None, help="first gap value")
@click.option("--d-max", type=float, default=None, help="last gap value")
@click.option("--steps", type=int, default=None, help="number of gap samples")
@_jobs_option
@_solver_options()
@_output_option
def sweep_collinear(
    radii: str,
    anchor: int,
    d_list: str | None,
    d_min: float | None,
    d_max: float | None,
    steps: int | None,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Capacity of a collinear chain as a function of the uniform gap d."""
    config = _solver_config(n, alpha, mode, oversample)
    rs = _parse_floats(radii, "radii")
    if d_list is not None:
        ds = _parse_floats(d_list, "d-list")
    elif d_min is not None and d_max is not None and steps is not None:
        if steps < 1:
            raise click.ClickException("steps must be at least 1")
        ds = list(np.linspace(d_min, d_max, steps))
    else:
        raise click.ClickException("give either --d-list or all of --d-min, --d-max, --steps")

    def row(d: float) -> tuple[float, float]:
        c = collinear_chain(rs, d, anchor=anchor)
        return d, capacity(c, config).cap

    rows = _guard(lambda: _pmap(row, ds, jobs))
    write_table(rows, output, ["d", "cap"])
    _write_sidecar(output, config, None)
    click.echo(f"wrote {output} ({len(rows)} rows)")


@main.command("sweep-threecircle")
@click.option("--r", type=float, default=0.3, show_default=True, help="common hyperbolic disk radius")
@click.option("--circle-radius", type=float, default=0.5, show_default=True, help="mounting circle |z|")
@click.option("--delta", type=float, default=0.02, show_default=True, help="minimal boundary separation")
@click.option("--steps", type=int, default=41, show_default=True, help="number of d samples")
@_jobs_option
@_solver_options()
@_output_option
def sweep_threecircle(
    r: float,
    circle_radius: float,
    delta: float,
    steps: int,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Three equal disks on a circle: capacity versus the distance d.

    One disk sits at angle 0, the other two at symmetric angles so both
    are at hyperbolic center distance d from it.  d runs from contact
    (2r + delta) up to the point where the two symmetric disks reach
    contact on the far side; the equilateral spacing is always included
    as a sample.
    """
    if steps < 2:
        raise click.ClickException("steps must be at least 2")
    config = _solver_config(n, alpha, mode, oversample)

    def build() -> list[tuple[float, float]]:
        d_lo = 2.0 * r + delta
        # far-side contact: angular gap between the symmetric disks equals
        # the contact angle, so their common angle is pi - y_contact / 2
        y_contact = _angle_step(circle_radius, d_lo)
        x_hi = math.pi - 0.5 * y_contact
        p_hi = circle_radius * complex(math.cos(x_hi), math.sin(x_hi))
        d_hi = hyp_distance(complex(circle_radius), p_hi)
        p_eq = circle_radius * complex(math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))
        d_eq = hyp_distance(complex(circle_radius), p_eq)
        ds = sorted(set(np.linspace(d_lo, d_hi, steps)) | {d_eq})

        def row(d: float) -> tuple[float, float]:
            x = _angle_step(circle_radius, d)
            c = circle_mounted([r, r, r], [0.0, x, -x], circle_radius, delta=delta)
            return d, capacity(c, config).cap

        return _pmap(row, ds, jobs)

    rows = _guard(build)
    write_table(rows, output, ["d", "cap"])
    _write_sidecar(output, config, delta)
    click.echo(f"wrote {output} ({len(rows)} rows)")


@main.command("sweep-rolling")
@click.option("--radii", required=True, help="comma list of fixed chain radii, left to right")
@click.option("--mobile", type=float, required=True, help="hyperbolic radius of the rolling disk")
@click.option("--delta", type=float, default=0.02, show_default=True, help="boundary separation of chain and roller")
@click.option("--chain-gap", type=float, default=None, help="gap between the fixed disks (default: delta)")
@click.option("--anchor", type=int, default=0, show_default=True, help="chain disk pinned at the origin")
@click.option("--samples", type=int, default=61, show_default=True, help="number of path samples")
@_jobs_option
@_solver_options()
@_output_option
def sweep_rolling(
    radii: str,
    mobile: float,
    delta: float,
    chain_gap: float | None,
    anchor: int,
    samples: int,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Capacity along the path of a disk rolling over a fixed chain."""
    if samples < 2:
        raise click.ClickException("samples must be at least 2")
    config = _solver_config(n, alpha, mode, oversample)
    rs = _parse_floats(radii, "radii")

    def build() -> list[tuple[float, float]]:
        chain = collinear_chain(rs, delta if chain_gap is None else chain_gap, anchor=anchor)
        path = rolling_path(chain, mobile, delta)

        def row(tau: float) -> tuple[float, float]:
            return tau, capacity(path.constellation(tau), config).cap

        return _pmap(row, np.linspace(0.0, 1.0, samples), jobs)

    rows = _guard(build)
    write_table(rows, output, ["tau", "cap"])
    _write_sidecar(output, config, delta)
    click.echo(f"wrote {output} ({len(rows)} rows)")


@main.command()
@_input_argument
@click.option("--mobile", type=int, required=True, help="index of the disk swept over the grid")
@click.option("--x-min", type=float, required=True)
@click.option("--x-max", type=float, required=True)
@click.option("--y-min", type=float, required=True)
@click.option("--y-max", type=float, required=True)
@click.option("--resolution", default="41", show_default=True, help="grid cells: 'n' or 'nx,ny'")
@click.option("--delta", type=float, default=None, help="separation delta (default: the file's)")
@_jobs_option
@_solver_options("1")
@_output_option
def grid(
    input: Path,
    mobile: int,
    x_min: float,
    x_max: float,
    y_min: float,
    y_max: float,
    resolution: str,
    delta: float | None,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Capacity level grid over positions of one mobile disk.

    Cells where the mobile disk would violate a separation constraint
    are left empty in the CSV.
    """
    config = _solver_config(n, alpha, mode, oversample)
    c = load_constellation(input)
    if not 0 <= mobile < c.m:
        raise click.ClickException(f"mobile index {mobile} out of range for {c.m} disks")
    parts = [p for p in resolution.split(",") if p.strip()]
    try:
        res = int(parts[0]) if len(parts) == 1 else (int(parts[0]), int(parts[1]))
    except (ValueError, IndexError):
        raise click.ClickException(f"bad resolution {resolution!r}")
    mobility: list = ["fixed"] * c.m
    mobility[mobile] = "free"

    def build():
        problem = OptimizationProblem(template=c, mobility=tuple(mobility), solver=config, delta=delta)
        return problem, level_grid(problem, (x_min, x_max), (y_min, y_max), res, jobs=jobs)

    problem, g = _guard(build)
    rows = [
        (x, y, g.values[iy, ix]) for iy, y in enumerate(g.ys) for ix, x in enumerate(g.xs)
    ]
    write_table(rows, output, ["x", "y", "cap"])
    _write_sidecar(output, config, problem.sep_delta)
    click.echo(f"wrote {output} ({len(rows)} rows)")
    click.echo(f"local minimum basins: {count_local_minima(g.values)}")


@main.command()
@_input_argument
@click.option("--mobility", required=True, help="comma list: fixed | free | diameter | circle:R per disk")
@click.option("--k", type=int, default=1, show_default=True, help="number of multistart runs")
@click.option("--tol", type=float, default=1e-6, show_default=True, help="stationarity tolerance")
@click.option("--seed", type=int, default=0, show_default=True, help="random-start seed")
@click.option("--max-iterations", type=int, default=300, show_default=True)
@click.option("--delta", type=float, default=None, help="separation delta (default: the file's)")
@_jobs_option
@_solver_options("1")
@_output_option
def optimize(
    input: Path,
    mobility: str,
    k: int,
    tol: float,
    seed: int,
    max_iterations: int,
    delta: float | None,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Minimize the capacity over the mobile disk coordinates.

    Writes a JSON file with the deduplicated multistart results sorted
    by capacity, and the best run's trajectory as '<stem>.trajectory.csv'.
    """
    config = _solver_config(n, alpha, mode, oversample)
    c = load_constellation(input)
    opt = OptimizerConfig(tol=tol, seed=seed, max_iterations=max_iterations)

    def build():
        problem = OptimizationProblem(
            template=c, mobility=_parse_mobility(mobility), solver=config, delta=delta
        )
        return problem, multistart(problem, k, opt, jobs=jobs)

    problem, results = _guard(build)
    payload = {"k": k, "results": [r.to_dict() for r in results]}
    output.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    traj_path = output.with_name(output.stem + ".trajectory.csv")
    write_table(results[0].trajectory, traj_path, ["evaluations", "cap"])
    _write_sidecar(output, config, problem.sep_delta)
    for r in results:
        click.echo(f"cap {_fmt(r.cap)}  status {r.status}  evaluations {r.evaluations}")
    click.echo(f"wrote {output}")


@main.command()
@click.option("--m", "m_disks", type=click.Choice(["2", "3", "4"]), required=True, help="number of equal disks")
@click.option("--case", type=click.Choice(["I", "II"]), default=None, help="ring layout for m=4")
@click.option("--r-min", type=float, default=0.02, show_default=True)
@click.option("--r-max", type=float, default=2.0, show_default=True)
@click.option("--r-step", type=float, default=0.02, show_default=True)
@click.option("--delta", type=float, default=0.02, show_default=True, help="pairwise boundary separation")
@_jobs_option
@_solver_options()
@_output_option
def bound(
    m_disks: str,
    case: str | None,
    r_min: float,
    r_max: float,
    r_step: float,
    delta: float,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Capacity of a ring of m equal disks against the equal-area lower bound.

    Emits rows (r, cap, lower, l_r) with l_r = (cap - lower) / lower.
    """
    if r_step <= 0.0 or r_max < r_min:
        raise click.ClickException("need r-step > 0 and r-max >= r-min")
    config = _solver_config(n, alpha, mode, oversample)
    m = int(m_disks)
    count = int(round((r_max - r_min) / r_step)) + 1
    rs = list(np.linspace(r_min, r_min + (count - 1) * r_step, count))

    def row(r: float) -> tuple[float, float, float, float]:
        c = er_config(m, r, case=case, gap=delta)
        value = capacity(c, config).cap
        low = gehring_bound(m, r)
        return r, value, low, (value - low) / low

    rows = _guard(lambda: _pmap(row, rs, jobs))
    write_table(rows, output, ["r", "cap", "lower", "l_r"])
    _write_sidecar(output, config, delta)
    click.echo(f"wrote {output} ({len(rows)} rows)")


@main.command()
@click.option("--layout", type=click.Choice(["diameter", "circle"]), required=True)
@click.option(
    "--radii",
    default=None,
    help="four descending radii (default: 0.5,0.4,0.25,0.2 on the diameter, 0.5,1/3,0.25,0.2 on the circle)",
)
@click.option("--delta", type=float, default=0.02, show_default=True, help="pairwise boundary separation")
@_jobs_option
@_solver_options()
@_output_option
def perm(
    layout: str,
    radii: str | None,
    delta: float,
    jobs: int,
    n: int,
    alpha: str,
    mode: str,
    oversample: str,
    output: Path,
) -> None:
    """Capacity of the twelve orderings of four disks, sorted ascending."""
    config = _solver_config(n, alpha, mode, oversample)
    if radii is None:
        rs = [0.5, 0.4, 0.25, 0.2] if layout == "diameter" else [0.5, 1.0 / 3.0, 0.25, 0.2]
    else:
        rs = _parse_floats(radii, "radii")

    def build() -> list[tuple[str, float]]:
        family = permutation_family(rs, layout, delta=delta)

        def row(c: Constellation) -> tuple[str, float]:
            return c.label, capacity(c, config).cap

        return sorted(_pmap(row, family, jobs), key=lambda t: t[1])

    rows = _guard(build)
    write_table(rows, output, ["label", "cap"])
    _write_sidecar(output, config, delta)
    click.echo(f"wrote {output} ({len(rows)} rows)")


@main.command()
@_input_argument
@click.option("--n-list", default="16,32,64,128", show_default=True, help="comma list of grid sizes")
@click.option("--alpha", default="auto", show_default=True, help="kernel base point 're,im', or 'auto'")
@click.option(
    "--mode",
    type=click.Choice(["direct", "iterative"]),
    default="direct",
    show_default=True,
    help="linear solver for the integral equation",
)
@_output_option
def convergence(input: Path, n_list: str, alpha: str, mode: str, output: Path) -> None:
    """Capacity error versus grid size, against a doubled-size reference."""
    c = load_constellation(input)
    try:
        ns = [int(p) for p in n_list.split(",") if p.strip()]
    except ValueError as exc:
        raise click.ClickException(f"bad n-list: {exc}")
    try:
        alpha_val = _parse_alpha(alpha)
    except ConfigurationError as exc:
        raise click.ClickException(str(exc))
    study = _guard(lambda: convergence_study(c, ns, alpha=alpha_val, mode=mode))
    write_table(study.rows, output, ["n", "cap", "error"])
    _write_sidecar(output, SolverConfig(n=study.ref_n, alpha=alpha_val, mode=mode), c.delta)
    click.echo(f"wrote {output} ({len(study.rows)} rows)")
    click.echo(f"cap_ref = {_fmt(study.cap_ref)} at n = {study.ref_n}")
    click.echo(f"sigma = {_fmt(study.sigma)}")


if __name__ == "__main__":
    main()
