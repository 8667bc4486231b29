"""Run driver: configuration, time loop, CSV output, error norms and
convergence tables.

Output files written into ``RunConfig.out``:

* ``fields_t<time>.csv``  -- one row per zone centre, columns
  ``x,rho,ux,uy,uz,p_par,p_perp,By,Bz,E,dp`` (plus ``tag`` for oracle runs),
  17 significant digits;
* ``summary.txt``         -- ``key = value`` run statistics;
* ``convergence.csv`` / ``convergence.txt`` -- for convergence studies.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigError, NonPhysical
from .problems import ProblemSpec, exact_solution, get_problem, init_problem, pad
from .scheme import NGHOST, RunStats, SchemeConfig, semidiscrete_rhs
from .state import DP, EN, cons_to_prim_grid
from .timeintegrator import accuracy_dt_rule, compute_dt, imex_rk3_step, max_signal_speed, ssprk3_step

CSV_HEADER = ("x", "rho", "ux", "uy", "uz", "p_par", "p_perp", "By", "Bz", "E", "dp")
SOLVERS = ("hll", "hlli", "rusanov")
CONVERGENCE_CFL = 0.3
DEFAULT = "default"  # sentinel: take tau from the problem definition


@dataclass
class RunConfig:
    """Everything needed to reproduce one run.

    ``tau`` is the relaxation time; ``"default"`` keeps the problem's own
    setting and ``None`` switches the source off. ``solver="rusanov"``
    selects the low-order reference scheme instead of the AFD-WENO scheme.
    """

    problem: str = "accuracy"
    order: int = 5
    solver: str = "hll"
    n: Optional[int] = None
    cfl: Optional[float] = None
    t_end: Optional[float] = None
    tau: object = DEFAULT
    out: Optional[str] = None
    dump_every: int = 0
    flattener: bool = True
    convergence: Optional[Sequence[int]] = None

    def __post_init__(self):
        self.solver = str(self.solver).lower()
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {', '.join(SOLVERS)}, got {self.solver!r}")
        if self.order not in (3, 5, 7):
            raise ConfigError(f"order must be 3, 5 or 7, got {self.order}")
        if self.n is not None and self.n < 10:
            raise ConfigError(f"n must be at least 10, got {self.n}")
        if self.cfl is not None and not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.t_end is not None and not self.t_end > 0.0:
            raise ConfigError("t_end must be positive")
        if self.tau is not None and self.tau != DEFAULT and not float(self.tau) > 0.0:
            raise ConfigError("tau must be positive (use no source to disable it)")
        if self.dump_every < 0:
            raise ConfigError("dump_every must be non-negative")
        if self.convergence is not None:
            self.convergence = tuple(int(m) for m in self.convergence)
            if not self.convergence or min(self.convergence) < 10:
                raise ConfigError("convergence meshes must be a non-empty list of sizes >= 10")
        get_problem(self.problem)  # raises UnknownProblem early

    @property
    def spec(self) -> ProblemSpec:
        return get_problem(self.problem)

    def resolved_tau(self) -> Optional[float]:
        return self.spec.tau if self.tau == DEFAULT else (None if self.tau is None else float(self.tau))

    def resolved_n(self) -> int:
        return self.spec.n if self.n is None else int(self.n)

    def resolved_t_end(self) -> float:
        return self.spec.t_end if self.t_end is None else float(self.t_end)

    def resolved_cfl(self) -> float:
        return self.spec.cfl if self.cfl is None else float(self.cfl)


@dataclass
class RunResult:
    x: np.ndarray
    U: np.ndarray
    W: np.ndarray
    t: float
    Bx: float
    dx: float
    steps: int
    stats: RunStats
    wall_time: float
    files: List[Path] = field(default_factory=list)

    def summary(self) -> dict:
        rho = self.W[:, 0]
        d = {
            "time": self.t,
            "zones": self.U.shape[0],
            "steps": self.steps,
            "stages_per_step": 3,
            "min_rho": float(rho.min()),
            "max_rho": float(rho.max()),
            "min_p_par": float(self.W[:, 4].min()),
            "min_p_perp": float(self.W[:, 5].min()),
            "max_abs_dp": float(np.abs(self.U[:, DP]).max()),
            "total_energy": float(self.U[:, EN].sum() * self.dx),
            "wall_time_s": round(self.wall_time, 3),
        }
        d.update(self.stats.as_dict())
        return d


class Norms(NamedTuple):
    """Discrete error norms at zone centres.

    ``l1 = dx * sum|e|``, ``linf = max|e|``; ``linf_scaled = dx * max|e|`` is
    the convention under which tabulated maximum-norm orders of smooth
    problems come out one higher than the L1 orders.
    """

    l1: float
    linf: float
    linf_scaled: float


@dataclass
class ConvergenceRow:
    n: int
    l1_error: float
    linf_error: float
    linf_scaled_error: float
    l1_order: Optional[float] = None
    linf_order: Optional[float] = None
    linf_scaled_order: Optional[float] = None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_fields_csv(path, x, U, Bx: float, tag: Optional[str] = None) -> Path:
    """Write zone-centred fields; ``tag`` adds a constant ``tag`` column."""
    path = Path(path)
    W = cons_to_prim_grid(U, Bx)
    header = list(CSV_HEADER) + (["tag"] if tag is not None else [])
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for xi, w, u in zip(x, W, U):
            row = [_fmt(xi)] + [_fmt(v) for v in w] + [_fmt(u[EN]), _fmt(u[DP])]
            if tag is not None:
                row.append(tag)
            wr.writerow(row)
    return path


def read_fields_csv(path) -> dict:
    """Columns of a field dump as float arrays (``tag`` kept as strings)."""
    with Path(path).open() as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for key in rows[0]:
        vals = [r[key] for r in rows]
        out[key] = np.array(vals) if key == "tag" else np.array(vals, dtype=np.float64)
    return out


def _stamp(t: float) -> str:
    return f"fields_t{t:.6f}.csv"


def write_summary(path, cfg: RunConfig, summary: dict) -> Path:
    path = Path(path)
    lines = [f"problem = {cfg.spec.id}", f"order = {cfg.order}", f"solver = {cfg.solver}",
             f"tau = {cfg.resolved_tau()}", f"cfl = {cfg.resolved_cfl()}"]
    lines += [f"{k} = {v}" for k, v in summary.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _advance(cfg: RunConfig, dt_fixed: Optional[float] = None, n: Optional[int] = None,
             write: bool = True) -> RunResult:
    spec = cfg.spec
    n = cfg.resolved_n() if n is None else n
    t_end = cfg.resolved_t_end()
    tau = cfg.resolved_tau()
    cfl = cfg.resolved_cfl()
    grid = init_problem(spec, n)
    scheme = SchemeConfig(cfg.order, cfg.solver, cfg.flattener)
    stats = RunStats()
    Bx, dx, bc = grid.Bx, grid.dx, grid.bc
    out_dir = Path(cfg.out) if (write and cfg.out) else None
    files: List[Path] = []
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        files.append(write_fields_csv(out_dir / _stamp(0.0), grid.x, grid.U, Bx))

    def L(V):
        return semidiscrete_rhs(pad(V, bc, NGHOST), Bx, dx, scheme, stats)

    U = grid.U
    t = 0.0
    steps = 0
    start = time.perf_counter()
    while t < t_end * (1.0 - 1e-14):
        if dt_fixed is None:
            dt = compute_dt(U, Bx, dx, cfl, t, t_end)
        else:
            dt = min(dt_fixed, t_end - t)
        try:
            U = ssprk3_step(U, dt, L) if tau is None else imex_rk3_step(U, dt, L, tau)
            max_signal_speed(U, Bx)  # positivity / NaN check of the new state
        except NonPhysical as exc:
            exc.time = t
            raise
        t += dt
        steps += 1
        if out_dir is not None and cfg.dump_every and steps % cfg.dump_every == 0 and t < t_end:
            files.append(write_fields_csv(out_dir / _stamp(t), grid.x, U, Bx))
    wall = time.perf_counter() - start
    W = cons_to_prim_grid(U, Bx)
    res = RunResult(grid.x, U, W, t, Bx, dx, steps, stats, wall, files)
    if out_dir is not None:
        files.append(write_fields_csv(out_dir / _stamp(t), grid.x, U, Bx))
        files.append(write_summary(out_dir / "summary.txt", cfg, res.summary()))
    return res


def _run_oracle(cfg: RunConfig, n: Optional[int] = None, write: bool = True) -> RunResult:
    from .reference import OracleConfig, run_oracle

    n = cfg.resolved_n() if n is None else n
    ocfg = OracleConfig(n=n) if cfg.cfl is None else OracleConfig(n=n, cfl=min(cfg.cfl, 0.5))
    start = time.perf_counter()
    x, U, steps = run_oracle(cfg.spec, ocfg, cfg.resolved_t_end(), cfg.resolved_tau(), return_steps=True)
    wall = time.perf_counter() - start
    spec = cfg.spec
    stats = RunStats()
    stats.rhs_evaluations = 2 * steps
    res = RunResult(x, U, cons_to_prim_grid(U, spec.Bx), cfg.resolved_t_end(), spec.Bx,
                    spec.length / n, steps, stats, wall)
    if write and cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        res.files.append(write_fields_csv(out_dir / _stamp(res.t), x, U, spec.Bx, tag="oracle"))
        summary = res.summary()
        summary["stages_per_step"] = 2
        res.files.append(write_summary(out_dir / "summary.txt", cfg, summary))
    return res


def run_simulation(cfg: RunConfig, write: bool = True) -> RunResult:
    """Run ``cfg`` to its final time; writes outputs when ``cfg.out`` is set.

    Raises
    ------
    NonPhysical
        If positivity is lost; ``index`` and ``time`` locate the failure.
    """
    if cfg.solver == "rusanov":
        return _run_oracle(cfg, write=write)
    return _advance(cfg, write=write)


# ---------------------------------------------------------------------------
# errors and convergence
# ---------------------------------------------------------------------------


def error_norms(W: np.ndarray, x: np.ndarray, spec: ProblemSpec | str, t: float,
                variable: Optional[int] = None) -> Norms:
    """Norms of ``W[:, variable] - exact`` over the zone centres ``x``.

    Raises
    ------
    NoExactSolution
        If the problem has no closed-form solution.
    """
    if isinstance(spec, str):
        spec = get_problem(spec)
    var = spec.error_variable if variable is None else variable
    exact = exact_solution(spec, x, t)
    e = np.abs(np.asarray(W)[:, var] - exact[:, var])
    dx = spec.length / x.shape[0]
    return Norms(float(dx * e.sum()), float(e.max()), float(dx * e.max()))


def _order(coarse: float, fine: float) -> Optional[float]:
    if coarse > 0.0 and fine > 0.0:
        return math.log2(coarse / fine)
    return None


def convergence_rows(errors: Sequence[tuple]) -> List[ConvergenceRow]:
    """Rows from ``(n, l1, linf, linf_scaled)`` tuples, with observed orders."""
    rows: List[ConvergenceRow] = []
    for k, (n, l1, li, ls) in enumerate(errors):
        row = ConvergenceRow(int(n), l1, li, ls)
        if k:
            p = rows[-1]
            row.l1_order = _order(p.l1_error, l1)
            row.linf_order = _order(p.linf_error, li)
            row.linf_scaled_order = _order(p.linf_scaled_error, ls)
        rows.append(row)
    return rows


def format_table(rows: Sequence[ConvergenceRow], title: str = "") -> str:
    def o(v):
        return f"{v:10.4f}" if v is not None else f"{'-':>10}"

    head = (f"{'N':>6} {'L1 error':>12} {'L1 order':>10} {'Linf error':>12} {'Linf order':>10}"
            f" {'dx*Linf':>12} {'order':>10}")
    lines = ([title] if title else []) + [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.n:>6} {r.l1_error:12.4e} {o(r.l1_order)} {r.linf_error:12.4e} "
                     f"{o(r.linf_order)} {r.linf_scaled_error:12.4e} {o(r.linf_scaled_order)}")
    return "\n".join(lines)


def write_convergence_csv(path, rows: Sequence[ConvergenceRow]) -> Path:
    path = Path(path)
    cols = ("n", "l1_error", "l1_order", "linf_error", "linf_order",
            "linf_scaled_error", "linf_scaled_order")
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(cols)
        for r in rows:
            wr.writerow(["" if getattr(r, c) is None else
                         (getattr(r, c) if c == "n" else _fmt(getattr(r, c))) for c in cols])
    return path


def convergence_table(cfg: RunConfig, meshes: Optional[Sequence[int]] = None):
    """Run the mesh sequence and return ``(rows, text_table)``.

    The coarsest mesh takes its step from CFL 0.3 (or ``cfg.cfl``) on the
    initial data; finer meshes use :func:`accuracy_dt_rule`, and the step is
    held fixed during each run.
    """
    meshes = tuple(meshes if meshes is not None else (cfg.convergence or ()))
    if not meshes:
        raise ConfigError("no meshes given for the convergence study")
    spec = cfg.spec
    if spec.exact is None:
        from .errors import NoExactSolution
        raise NoExactSolution(f"problem {spec.id!r} has no exact solution")
    if cfg.solver == "rusanov":
        raise ConfigError("convergence studies use the AFD-WENO scheme (hll or hlli)")
    g0 = init_problem(spec, meshes[0])
    cfl = CONVERGENCE_CFL if cfg.cfl is None else cfg.cfl
    base_dt = cfl * g0.dx / max_signal_speed(g0.U, g0.Bx)
    errors = []
    for level, n in enumerate(meshes):
        dt = accuracy_dt_rule(level, base_dt, cfg.order)
        res = _advance(cfg, dt_fixed=dt, n=n, write=False)
        nrm = error_norms(res.W, res.x, spec, res.t)
        errors.append((n, nrm.l1, nrm.linf, nrm.linf_scaled))
    rows = convergence_rows(errors)
    title = (f"{spec.title}: order {cfg.order}, {cfg.solver.upper()}, "
             f"variable {CSV_HEADER[1 + spec.error_variable]}")
    text = format_table(rows, title)
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_convergence_csv(out_dir / "convergence.csv", rows)
        (out_dir / "convergence.txt").write_text(text + "\n")
    return rows, text


def total_variation(a: np.ndarray) -> float:
    return float(np.abs(np.diff(a)).sum())


def compare_to_reference(x: np.ndarray, rho: np.ndarray, x_ref: np.ndarray, rho_ref: np.ndarray) -> float:
    """Mean absolute difference between a solution and a finer reference.

    The reference is linearly interpolated to the run's zone centres; the
    result is the L1 distance per unit length.
    """
    ref = np.interp(x, x_ref, rho_ref)
    return float(np.abs(np.asarray(rho) - ref).mean())
