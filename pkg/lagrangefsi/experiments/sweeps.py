"""
Parameter sweeps over the kappa-regularized system.

Every member of a sweep is an independent run of an identical configuration
except for the swept value. Members run in a process pool whose size is capped
by the FSI_THREADS environment variable (a `.env` file is honored).
"""

import os
import numpy as np
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple
from colorama import Fore, Style
from dotenv import load_dotenv
from tqdm import tqdm

from lagrangefsi.core.datatypes import (
    ConvergenceRow,
    ConvergenceTable,
    GrowthRow,
    GrowthTable,
    SweepRow,
    SweepTable,
    Trajectory,
)
from lagrangefsi.core.exceptions import ConfigValidationError, ExperimentError
from lagrangefsi.mesh.phase_mesh import build_mesh
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.stepper import run
from lagrangefsi.stepper.diagnostics import h1_norm

SWEEP_COLOR = f"{Fore.CYAN}"

def worker_count(n_jobs: int) -> int:
    """
    The number of worker processes for n_jobs independent runs.

    Raises:
        ConfigValidationError: If FSI_THREADS is set to something else than a positive integer.
    """
    load_dotenv()
    raw = os.environ.get("FSI_THREADS")
    if raw is None or raw.strip() == "":
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigValidationError(f"FSI_THREADS must be a positive integer, got '{raw}'", field="FSI_THREADS")
        if cap < 1:
            raise ConfigValidationError(f"FSI_THREADS must be a positive integer, got '{raw}'", field="FSI_THREADS")
    return max(1, min(cap, n_jobs))

def _run_job(job: Tuple) -> Trajectory:
    config, u0_override, keep_states = job
    return run(config, u0_override=u0_override, keep_states=keep_states)

def run_jobs(jobs: Sequence[Tuple], verbose: bool = False) -> List[Trajectory]:
    """
    Run (config, u0_override, keep_states) jobs, in parallel when more than one worker is allowed.

    Results come back in job order whatever the pool size.
    """
    jobs = list(jobs)
    workers = worker_count(len(jobs))
    if verbose:
        print(f"{SWEEP_COLOR}{len(jobs)} runs on {workers} worker(s){Style.RESET_ALL}")
    if workers == 1:
        return [_run_job(job) for job in tqdm(jobs, desc="sweep", disable=not verbose)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(_run_job, jobs), total=len(jobs), desc="sweep", disable=not verbose))

def kappa_configs(base_config, kappa_list: Sequence[float], t_end: Optional[float] = None) -> list:
    """Copies of base_config differing only in kappa (and the common horizon when given)."""
    numerics = {} if t_end is None else {"t_end": t_end}
    return [base_config.replace(numerics={**numerics, "kappa": kappa}) for kappa in kappa_list]

def kappa_runs(base_config, kappa_list: Sequence[float], t_end: Optional[float] = None,
               keep_states: bool = True, verbose: bool = False) -> List[Tuple[float, Trajectory]]:
    configs = kappa_configs(base_config, kappa_list, t_end)
    trajectories = run_jobs([(config, None, keep_states) for config in configs], verbose=verbose)
    return list(zip(kappa_list, trajectories))

def run_name(kappa: float) -> str:
    return f"kappa_{kappa!r}"

def sweep_table(runs: Sequence[Tuple[float, Trajectory]], t_end: float) -> SweepTable:
    """Tabulate T* and the Z-norm proxy, rows sorted by kappa descending."""
    rows = []
    for kappa, trajectory in sorted(runs, key=lambda item: -item[0]):
        rows.append(
            SweepRow(
                kappa=kappa,
                t_star=trajectory.t_star,
                reached_end=trajectory.reached_end,
                zt_norm=trajectory.records[-1].zt_proxy,
                finish_reason=trajectory.finish_reason,
                run_name=run_name(kappa),
            )
        )
    return SweepTable(t_end=t_end, rows=rows)

def kappa_sweep(base_config, kappa_list: Optional[Sequence[float]] = None, t_end: Optional[float] = None,
                verbose: bool = False) -> SweepTable:
    """
    Run the configuration once per kappa and tabulate the existence-time proxy.

    Failures are rows of the table, they are never raised.

    Parameters:
        kappa_list (Sequence[float]): Defaults to the configured experiment list.
        t_end (float): Common horizon, defaults to the configured final time.
    """
    kappa_list = base_config.experiment.kappa_list if kappa_list is None else list(kappa_list)
    horizon = base_config.numerics.t_end if t_end is None else t_end
    runs = kappa_runs(base_config, kappa_list, horizon, keep_states=False, verbose=verbose)
    return sweep_table(runs, horizon)

def h1_problem(config) -> FSIProblem:
    return FSIProblem(build_mesh(config.geometry_spec()), config.solver_params())

def common_levels(trajectories: Sequence[Trajectory]) -> int:
    """The number of time levels every trajectory has accepted, initial state included."""
    return min(len(trajectory.states) for trajectory in trajectories)

def trajectory_distance(first: Trajectory, second: Trajectory, problem: FSIProblem, n_levels: Optional[int] = None) -> float:
    """
    Discrete L2(0,T;H1) distance sqrt(sum dt |v1^n - v2^n|_H1^2).

    Parameters:
        n_levels (int): Time levels to cover, all the common ones when None.
    """
    n_levels = common_levels([first, second]) if n_levels is None else min(n_levels, common_levels([first, second]))
    total = 0.0
    for n in range(1, n_levels):
        a, b = first.states[n], second.states[n]
        total += (a.t - first.states[n - 1].t) * h1_norm(a.v - b.v, problem) ** 2
    return float(np.sqrt(total))

def convergence_table(runs: Sequence[Tuple[float, Trajectory]], reference: Trajectory, reference_kappa: float,
                      problem: FSIProblem, n_levels: Optional[int] = None) -> ConvergenceTable:
    """Distances of the runs to the reference; with n_levels every row covers the same interval."""
    rows = [
        ConvergenceRow(kappa=kappa, distance=trajectory_distance(trajectory, reference, problem, n_levels))
        for kappa, trajectory in sorted(runs, key=lambda item: -item[0])
    ]
    horizon = None
    if n_levels is not None:
        horizon = reference.states[min(n_levels, len(reference.states)) - 1].t
    return ConvergenceTable(reference_kappa=reference_kappa, rows=rows, horizon=horizon)

def _require_finished(kappa: float, trajectory: Trajectory):
    if not trajectory.reached_end:
        raise ExperimentError(
            f"The kappa={kappa!r} run stopped at t={trajectory.t_star!r} ({trajectory.finish_reason.value}) "
            f"before the common horizon {trajectory.t_end!r}"
        )

def kappa_convergence(
        base_config,
        kappa_list: Optional[Sequence[float]] = None,
        reference_kappa: Optional[float] = None,
        t_end: Optional[float] = None,
        verbose: bool = False,
    ) -> ConvergenceTable:
    """
    Distance of every kappa run to the reference run in the discrete L2(0,T;H1) norm.

    Raises:
        ExperimentError: If some run, the reference included, stops before the horizon.
    """
    experiment = base_config.experiment
    kappa_list = experiment.kappa_list if kappa_list is None else list(kappa_list)
    reference_kappa = experiment.reference_kappa if reference_kappa is None else reference_kappa
    horizon = base_config.numerics.t_end if t_end is None else t_end
    values = list(dict.fromkeys([*kappa_list, reference_kappa]))
    results = dict(kappa_runs(base_config, values, horizon, keep_states=True, verbose=verbose))
    for kappa, trajectory in results.items():
        _require_finished(kappa, trajectory)
    runs = [(kappa, results[kappa]) for kappa in kappa_list]
    table = convergence_table(runs, results[reference_kappa], reference_kappa, h1_problem(base_config),
                              common_levels(list(results.values())))
    if verbose:
        print(f"{SWEEP_COLOR}convergence to kappa={reference_kappa!r}: monotone={table.monotone}{Style.RESET_ALL}")
    return table

def perturbation_direction(problem: FSIProblem) -> np.ndarray:
    """A solid bump of unit consistent-mass norm; it is compatible by construction."""
    direction = solid_bump(problem.mesh, 1.0)
    direction[problem.mesh.boundary_nodes] = 0.0
    x = direction.ravel()
    norm = float(np.sqrt(x @ (problem.mass @ x)))
    if norm == 0.0:
        raise ExperimentError("The solid bump vanishes on this mesh, refine it to resolve the solid interior")
    return direction / norm

def sup_velocity_distance(first: Trajectory, second: Trajectory, problem: FSIProblem) -> float:
    """max_n |v1^n - v2^n|_L2 over the common time levels."""
    largest = 0.0
    for a, b in zip(first.states, second.states):
        x = (a.v - b.v).ravel()
        largest = max(largest, float(np.sqrt(max(x @ (problem.mass @ x), 0.0))))
    return largest

def perturbation_study(base_config, delta_list: Optional[Sequence[float]] = None, verbose: bool = False) -> GrowthTable:
    """
    Growth ratios r(delta) = max_t |v_delta - v|_L2 / delta of runs started from u0 + delta phi.

    delta = 0 reproduces the base run and its ratio is defined as 0.

    Raises:
        ExperimentError: If the base run or a perturbed run stops before t_end.
    """
    delta_list = base_config.experiment.delta_list if delta_list is None else list(delta_list)
    problem = FSIProblem.from_config(base_config)
    u0 = problem.compat.u0
    direction = perturbation_direction(problem)
    jobs = [(base_config, u0, True)] + [(base_config, u0 + delta * direction, True) for delta in delta_list]
    base, *perturbed = run_jobs(jobs, verbose=verbose)
    _require_finished(base_config.numerics.kappa, base)
    rows = []
    for delta, trajectory in zip(delta_list, perturbed):
        if not trajectory.reached_end:
            raise ExperimentError(
                f"The run perturbed by delta={delta!r} stopped at t={trajectory.t_star!r} ({trajectory.finish_reason.value})"
            )
        ratio = 0.0 if delta == 0.0 else sup_velocity_distance(trajectory, base, problem) / delta
        rows.append(GrowthRow(delta=delta, ratio=ratio))
    return GrowthTable(rows=rows)
