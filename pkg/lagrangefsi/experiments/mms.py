"""
Manufactured-solution refinement ladders.

The temporal family manufactures a flow at the spatially discrete level, so
the backward-Euler error is the only error left. The spatial family solves a
static St. Venant-Kirchhoff problem on the solid against a closed-form
displacement.
"""

import numpy as np
from typing import Callable, Optional, Sequence
from colorama import Fore, Style
from tqdm import tqdm

from lagrangefsi.core.datatypes import Phase, PointRule, RateRow, RateTable, SolverParams
from lagrangefsi.core.exceptions import ExperimentError
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.kinematics.recovery import at_points
from lagrangefsi.operators.assembly import assemble_load
from lagrangefsi.operators.elasticity import svk_stress
from lagrangefsi.solvers.newton import solve_newton
from lagrangefsi.stepper.problem import FSIProblem
from lagrangefsi.stepper.residual import elastic_term, internal_force
from lagrangefsi.stepper.stepper import march

MMS_COLOR = f"{Fore.MAGENTA}"

MMS_FAMILIES = ("temporal", "spatial")

def fitted_rate(levels: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(level)."""
    levels, errors = np.asarray(levels, dtype=float), np.asarray(errors, dtype=float)
    if len(levels) < 2:
        raise ExperimentError(f"A rate needs at least two levels, got {len(levels)}")
    if np.any(errors <= 0.0):
        return float("nan")
    return float(np.polyfit(np.log(levels), np.log(errors), 1)[0])

def rate_table(family: str, variable: str, levels: Sequence[float], errors: Sequence[float]) -> RateTable:
    return RateTable(
        family=family,
        variable=variable,
        rows=[RateRow(level=level, error=error) for level, error in zip(levels, errors)],
        rate=fitted_rate(levels, errors),
        monotone=all(b < a for a, b in zip(errors, errors[1:])),
    )

def _sine_mode(x: np.ndarray, extent) -> np.ndarray:
    s = np.ones(len(x))
    for k, L in enumerate(extent):
        s = s * np.sin(np.pi * x[:, k] / L)
    return s

def temporal_error(dt: float, h: float = 0.125, t_end: float = 0.4, eps_pen: float = 1e-2, nu: float = 1.0,
                   dimension: int = 2) -> float:
    """
    Final-time velocity error of backward Euler against v* = sin(2t) W on a pure-fluid container.

    The cofactor is frozen to the identity and the defect load M v*' + F_int(eta*, v*)
    with eta* = Id + (1 - cos 2t)/2 W makes (eta*, v*) the exact discrete-in-space solution.
    """
    mesh = build_mesh(GeometrySpec(dimension=dimension, extent=(1.0,) * dimension, h=h), require_solid=False)
    params = SolverParams(
        nu=nu,
        kappa=0.0,
        eps_pen=eps_pen,
        dt=dt,
        t_end=t_end,
        freeze_cofactor=True,
        include_kappa_forcing=False,
        z_ceiling=1e300,
    )
    problem = FSIProblem(mesh, params)
    W = 0.1 * np.repeat(_sine_mode(mesh.nodes, mesh.extent)[:, None], dimension, axis=1)
    theta = lambda t: np.sin(2.0 * t)
    dtheta = lambda t: 2.0 * np.cos(2.0 * t)
    Theta = lambda t: 0.5 * (1.0 - np.cos(2.0 * t))

    def defect(t: float) -> np.ndarray:
        inertia = (problem.mass @ (dtheta(t) * W).ravel()).reshape(W.shape)
        return inertia + internal_force(problem, mesh.nodes + Theta(t) * W, theta(t) * W, t)

    problem.extra_load = defect
    trajectory = march(problem, keep_states=False)
    if not trajectory.reached_end:
        raise ExperimentError(f"The manufactured flow stopped at t={trajectory.t_star!r} ({trajectory.finish_reason.value})")
    final = trajectory.states[-1]
    x = (final.v - theta(final.t) * W).ravel()
    return float(np.sqrt(x @ (problem.mass @ x)))

def _exact_displacement(x: np.ndarray, alpha: float) -> np.ndarray:
    u = np.zeros_like(x)
    u[..., 0] = np.sin(np.pi * x[..., 0]) * np.cos(np.pi * x[..., 1])
    u[..., 1] = np.cos(np.pi * x[..., 0]) * np.sin(np.pi * x[..., 1])
    return alpha * u

def _exact_gradient(x: np.ndarray, alpha: float) -> np.ndarray:
    """grad of Id + u* in closed form, shape (..., d, d)."""
    d = x.shape[-1]
    F = np.broadcast_to(np.eye(d), x.shape + (d,)).copy()
    sx, cx = np.sin(np.pi * x[..., 0]), np.cos(np.pi * x[..., 0])
    sy, cy = np.sin(np.pi * x[..., 1]), np.cos(np.pi * x[..., 1])
    F[..., 0, 0] += alpha * np.pi * cx * cy
    F[..., 0, 1] -= alpha * np.pi * sx * sy
    F[..., 1, 0] -= alpha * np.pi * sx * sy
    F[..., 1, 1] += alpha * np.pi * cx * cy
    return F

def manufactured_body_force(x: np.ndarray, c, alpha: float, step: float = 1e-5) -> np.ndarray:
    """b = -div P(grad eta*) by central differences of the closed-form stress."""
    d = x.shape[-1]
    b = np.zeros(x.shape)
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        P_plus = svk_stress(_exact_gradient(x + e, alpha), c)
        P_minus = svk_stress(_exact_gradient(x - e, alpha), c)
        b -= (P_plus[..., :, j] - P_minus[..., :, j]) / (2.0 * step)
    return b

def spatial_error(h: float, alpha: float = 0.05, lam: float = 1.0, mu: float = 1.0, newton_tol: float = 1e-11) -> float:
    """
    L2 error on the solid of the static St. Venant-Kirchhoff solution with Dirichlet data on the interface.

    Raises:
        ExperimentError: If Newton does not converge.
    """
    solid = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    mesh = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=h, solids=[solid]))
    problem = FSIProblem(mesh, SolverParams(lam=lam, mu=mu))
    cells = problem.solid_cells
    points = mesh.points(cells, PointRule.Gauss)
    load = assemble_load(manufactured_body_force(points, problem.c, alpha), mesh, cells)

    d = mesh.dimension
    unknown = np.flatnonzero(mesh.node_in_solid & ~mesh.node_in_fluid)
    dofs = (unknown[:, None] * d + np.arange(d)).ravel()
    eta0 = mesh.nodes + _exact_displacement(mesh.nodes, alpha)
    eta0[unknown] = mesh.nodes[unknown]

    def configuration(x: np.ndarray) -> np.ndarray:
        eta = eta0.copy().ravel()
        eta[dofs] = x
        return eta.reshape(eta0.shape)

    def residual(x: np.ndarray) -> np.ndarray:
        force, _ = elastic_term(configuration(x), problem, 1.0)
        return (force - load).ravel()[dofs]

    def jacobian(x: np.ndarray):
        _, J = elastic_term(configuration(x), problem, 1.0, jacobian=True)
        return J[dofs][:, dofs]

    x, report = solve_newton(residual, jacobian, eta0.ravel()[dofs], tol=newton_tol, maxit=30)
    if not report.converged:
        raise ExperimentError(f"Static solid problem at h={h!r} did not converge: |R| = {report.residual_norm:.3e}")
    eta = configuration(x)
    error = at_points(eta, mesh, cells) - (points + _exact_displacement(points, alpha))
    w = mesh.weights(PointRule.Gauss)[None, :]
    return float(np.sqrt(np.sum(w * np.sum(error ** 2, axis=-1))))

def mms_convergence(
        family: str,
        levels: Optional[Sequence[float]] = None,
        verbose: bool = False,
    ) -> RateTable:
    """
    Errors over a refinement ladder and the fitted rate.

    Parameters:
        family (str): "temporal" (levels are time steps) or "spatial" (levels are mesh sizes).
        levels (Sequence[float]): Coarse to fine, at least three.

    Raises:
        ValueError: On an unknown family or fewer than three levels.
    """
    if family == "temporal":
        levels = [0.02, 0.01, 0.005] if levels is None else list(levels)
        solve: Callable[[float], float] = temporal_error
        variable = "dt"
    elif family == "spatial":
        levels = [1.0 / 8, 1.0 / 16, 1.0 / 32] if levels is None else list(levels)
        solve = spatial_error
        variable = "h"
    else:
        raise ValueError(f"Unknown manufactured family '{family}', expected one of {MMS_FAMILIES}")
    if len(levels) < 3:
        raise ValueError(f"A refinement ladder needs at least 3 levels, got {len(levels)}")
    errors = [solve(level) for level in tqdm(levels, desc=f"mms {family}", disable=not verbose)]
    table = rate_table(family, variable, levels, errors)
    if verbose:
        status = "" if table.monotone else " (non-monotone)"
        print(f"{MMS_COLOR}{family}: rate {table.rate:.3f} in {variable}{status}{Style.RESET_ALL}")
    return table
