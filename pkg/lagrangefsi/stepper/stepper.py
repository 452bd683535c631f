"""Implicit marching of the kappa-regularized, penalized system. License: GPL-3.0"""

import numpy as np
from typing import Callable, Optional, Tuple
from colorama import Fore, Style
from tqdm import tqdm

from lagrangefsi.core.datatypes import (
    DeformationState,
    DiagnosticsRecord,
    FinishReason,
    Phase,
    PointRule,
    StepReport,
    Trajectory,
    CompatReport,
)
from lagrangefsi.core.exceptions import NewtonError, SolverError, StepFailure
from lagrangefsi.kinematics.fields import CofactorField, gradient, cofactor, jacobian_det, identity_configuration
from lagrangefsi.kinematics.recovery import at_points
from lagrangefsi.operators.fluid import lagrangian_div
from lagrangefsi.solvers.newton import solve_newton
from lagrangefsi.compat.checker import check_compatibility
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.residual import ResidualEvaluator
from lagrangefsi.stepper.diagnostics import ZProxy, record_state, kinetic_energy, elastic_energy, constraint_residual

STEP_COLOR = f"{Fore.GREEN}"
FAILURE_COLOR = f"{Fore.RED}"

def penalty_pressure(state: DeformationState, compat, eps_pen: float, mesh, freeze_cofactor: bool = False) -> np.ndarray:
    """
    q = q0 + t q1 + t^2/2 q2 - (1/eps) a_i^j v^i,_j at every fluid cell centre.

    Parameters:
        compat (CompatData): The hierarchy providing q0, q1, q2; zero when None.

    Returns:
        np.ndarray: Cellwise pressure (n_cells,), zero on the solid cells.

    Raises:
        ValueError: If eps_pen is not positive.
    """
    if not eps_pen > 0:
        raise ValueError(f"Invalid penalty parameter eps_pen={eps_pen!r}, must be positive")
    q = np.zeros(mesh.n_cells)
    cells = mesh.cells_of(Phase.Fluid)
    if len(cells) == 0:
        return q
    F = gradient(state.eta, mesh, Phase.Fluid, PointRule.Center)
    if freeze_cofactor:
        a = CofactorField(values=np.broadcast_to(np.eye(mesh.dimension), F.values.shape).copy(),
                          mesh=mesh, phase=Phase.Fluid, rule=PointRule.Center, cells=cells)
    else:
        a = cofactor(F)
    divergence = lagrangian_div(a, state.v).values[:, 0]
    hierarchy = 0.0
    if compat is not None:
        hierarchy = at_points(compat.pressure(state.t), mesh, cells, PointRule.Center)[:, 0]
    q[cells] = hierarchy - divergence / eps_pen
    return q

def initial_state(problem: FSIProblem) -> DeformationState:
    """eta = Id, v = u0 (zero on the outer boundary) and the penalty pressure at t=0."""
    v = problem.compat.u0.copy()
    v[problem.mesh.boundary_nodes] = 0.0
    state = DeformationState(t=0.0, eta=identity_configuration(problem.mesh), v=v, q=np.zeros(problem.mesh.n_cells))
    state.q = penalty_pressure(state, problem.compat, problem.params.eps_pen, problem.mesh, problem.params.freeze_cofactor)
    return state

def _failure(index: int, t: float, reason: FinishReason, message: str, **values) -> StepReport:
    return StepReport(step=index, t=t, converged=False, failure=reason, message=message, **values)

def step(
        state: DeformationState,
        problem: FSIProblem,
        t_new: Optional[float] = None,
        raise_on_failure: bool = False,
    ) -> Tuple[DeformationState, StepReport]:
    """
    One backward-Euler step solved by Newton from the old velocity.

    Returns:
        The new state and its report; on failure the input state and a report
        carrying the FinishReason.

    Raises:
        StepFailure: On failure when raise_on_failure is set, carrying the FinishReason and the report.
    """
    new_state, report = _step(state, problem, t_new)
    if raise_on_failure and report.failure is not None:
        raise StepFailure(f"Step to t={report.t!r} failed: {report.message}", report.failure, report)
    return new_state, report

def _step(state: DeformationState, problem: FSIProblem, t_new: Optional[float]) -> Tuple[DeformationState, StepReport]:
    params, mesh = problem.params, problem.mesh
    t_new = state.t + params.dt if t_new is None else t_new
    index = int(round(t_new / params.dt))
    evaluator = ResidualEvaluator(problem, state, t_new)
    try:
        x, solve = solve_newton(
            evaluator.residual,
            evaluator.jacobian,
            evaluator.pack(state.v),
            tol=params.newton_tol,
            maxit=params.newton_maxit,
        )
    except (NewtonError, SolverError) as e:
        return state, _failure(index, t_new, FinishReason.NewtonFailure, str(e))
    if not solve.converged:
        return state, _failure(
            index,
            t_new,
            FinishReason.NewtonFailure,
            f"Newton stopped at |R| = {solve.residual_norm:.3e} after {solve.iterations} iterations",
            newton_iterations=solve.iterations,
            residual_norm=solve.residual_norm,
        )
    v = evaluator.unpack(x)
    eta = evaluator.configuration(v)
    det = jacobian_det(gradient(eta, mesh), warn=False).values
    smallest = float(det.min())
    if not smallest > 0.0:
        return state, _failure(
            index,
            t_new,
            FinishReason.DiffeomorphismLoss,
            f"det(grad eta) reaches {smallest:.3e}",
            newton_iterations=solve.iterations,
            residual_norm=solve.residual_norm,
            min_det=smallest,
        )
    new_state = DeformationState(t=t_new, eta=eta, v=v, q=np.zeros(mesh.n_cells))
    new_state.q = penalty_pressure(new_state, problem.compat, params.eps_pen, mesh, params.freeze_cofactor)
    report = StepReport(
        step=index,
        t=t_new,
        newton_iterations=solve.iterations,
        residual_norm=solve.residual_norm,
        converged=True,
        constraint_residual=constraint_residual(eta, v, problem),
        min_det=smallest,
        kinetic_energy=kinetic_energy(v, problem),
        elastic_energy=elastic_energy(eta, problem),
    )
    return new_state, report

def march(
        problem: FSIProblem,
        state0: Optional[DeformationState] = None,
        compat_report: Optional[CompatReport] = None,
        keep_states: bool = True,
        on_state: Optional[Callable[[int, DeformationState, DiagnosticsRecord], None]] = None,
    ) -> Trajectory:
    """
    March from state0 (the initial state when None) until t_end or the first failure.

    T* is the time the failing step tried to reach, or t_end exactly when the
    march finishes. A Z-proxy above z_ceiling times its value after the first
    step counts as blow-up.

    Parameters:
        keep_states (bool): Keep every accepted state, otherwise only the first and the last.
        on_state (Callable): Called with (step, state, record) for every accepted state.
    """
    params = problem.params
    state = initial_state(problem) if state0 is None else state0
    t0 = state.t
    n_steps = int(round((params.t_end - t0) / params.dt))
    zproxy = ZProxy()
    record = record_state(problem, state, 0, zproxy)
    trajectory = Trajectory(
        states=[state],
        records=[record],
        t_end=params.t_end,
        t_star=params.t_end,
        compat_report=compat_report,
    )
    if on_state is not None:
        on_state(0, state, record)
    reference = None
    for n in tqdm(range(1, n_steps + 1), desc="march", disable=not problem.verbose):
        t_new = t0 + n * params.dt
        new_state, report = step(state, problem, t_new)
        trajectory.reports.append(report)
        if report.failure is not None:
            trajectory.finish_reason = report.failure
            trajectory.t_star = t_new
            if problem.verbose:
                print(f"{FAILURE_COLOR}step {n} failed ({report.failure.value}): {report.message}{Style.RESET_ALL}")
            break
        state = new_state
        record = record_state(problem, state, n, zproxy, report)
        if keep_states:
            trajectory.states.append(state)
        else:
            trajectory.states = [trajectory.states[0], state]
        trajectory.records.append(record)
        if on_state is not None:
            on_state(n, state, record)
        if reference is None:
            reference = record.zt_proxy
        elif reference > 0.0 and record.zt_proxy > params.z_ceiling * reference:
            trajectory.finish_reason = FinishReason.NormBlowUp
            trajectory.t_star = t_new
            if problem.verbose:
                print(f"{FAILURE_COLOR}Z-norm proxy {record.zt_proxy:.3e} exceeds the ceiling at t={t_new!r}{Style.RESET_ALL}")
            break
    if problem.verbose and trajectory.reached_end:
        print(f"{STEP_COLOR}reached t_end={params.t_end!r} in {n_steps} steps{Style.RESET_ALL}")
    return trajectory

def run(
        config,
        u0_override: Optional[np.ndarray] = None,
        keep_states: bool = True,
        on_state: Optional[Callable] = None,
        verbose: bool = False,
    ) -> Trajectory:
    """
    Build the problem of a RunConfig, check the compatibility of its data and march.

    Step failures end the march and are recorded as data, they are never raised.
    """
    problem = FSIProblem.from_config(config, u0_override=u0_override, verbose=verbose)
    compat_report = check_compatibility(problem.compat, problem.forcing, problem.mesh, problem.params)
    return march(problem, compat_report=compat_report, keep_states=keep_states, on_state=on_state)
