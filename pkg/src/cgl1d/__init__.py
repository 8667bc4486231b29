"""High-order AFD-WENO solver for the one-dimensional CGL anisotropic-pressure
plasma equations.

Quick start::

    from cgl1d import RunConfig, run_simulation, convergence_table

    res = run_simulation(RunConfig(problem="rp1", order=5, solver="hlli"), write=False)
    rows, text = convergence_table(RunConfig(problem="accuracy", order=5), [10, 20, 40])
"""
from .errors import (CGLError, ConfigError, DegenerateField, IllConditioned, NoConvergence,
                     NoExactSolution, NonPhysical, NotHyperbolic, UnknownProblem)
from .state import (NVAR, OmegaRegion, classify_omega, cons_to_prim, cons_to_prim_grid, flux,
                    noncons_matrix, prim_to_cons, prim_to_cons_grid, source)
from .eigensystem import (EigenDecomp, Field, WaveSpeeds, eigendecomp_cons, linear_degeneracy_check,
                          quasilinear_matrix, right_eigenvectors_prim, wave_speeds)
from .weno import boundary_derivative_interpolate, smoothness_indicators, weno_ao_interpolate
from .riemann import (FluctuationPair, SpeedBounds, hll_fluctuations, hll_star_state,
                      hlli_fluctuations, path_integral_C, shock_detector, speed_bounds)
from .scheme import NGHOST, RunStats, SchemeConfig, flatten, semidiscrete_rhs
from .timeintegrator import (accuracy_dt_rule, compute_dt, imex_rk3_step, max_signal_speed,
                             ssprk3_step)
from .problems import (PROBLEM_IDS, RIEMANN_IDS, ProblemSpec, apply_bc, exact_solution, get_problem,
                       init_problem, pad)
from .reference import OracleConfig, deep_star_oracle, run_oracle, rusanov_step
from .harness import (ConvergenceRow, Norms, RunConfig, RunResult, convergence_table, error_norms,
                      run_simulation)

__version__ = "0.1.0"
