"""
Uniform bounds for eps L(u_t) + L(u) = g on the solid.

With y = L(u) the evolution becomes eps y' + y = g. It is integrated exactly on
each step for g linear in time, so every new y is a convex combination of the
previous y and two samples of g and sup |y| <= max(|L(u0)|, sup |g|) holds
discretely for every eps.
"""

import numpy as np
import scipy.linalg
from typing import Callable, Dict, List, Sequence, Tuple
from colorama import Fore, Style

from lagrangefsi.core.datatypes import LemmaKeyReport, Phase
from lagrangefsi.core.exceptions import ExperimentError
from lagrangefsi.operators.assembly import assemble_mass
from lagrangefsi.operators.elasticity import ElasticityTensor, linear_L, stiffness_L

LEMMA_COLOR = f"{Fore.YELLOW}"

def exponential_weights(step: float, eps: float) -> Tuple[float, float, float]:
    """
    Coefficients (E, alpha, beta) of y_new = E y + alpha g_old + beta g_new.

    They are nonnegative and sum to one.
    """
    r = step / eps
    E = float(np.exp(-r))
    phi = float(-np.expm1(-r) / r)
    return E, phi - E, 1.0 - phi

def integrate_relaxation(y0: np.ndarray, g: Callable[[float], np.ndarray], eps: float, times: Sequence[float]) -> List[np.ndarray]:
    """Exact-per-step solution of eps y' + y = g on the time grid, g linear between grid points."""
    y = np.asarray(y0, dtype=float).copy()
    values = [y.copy()]
    g_old = np.asarray(g(times[0]), dtype=float)
    for t_old, t_new in zip(times, times[1:]):
        E, alpha, beta = exponential_weights(t_new - t_old, eps)
        g_new = np.asarray(g(t_new), dtype=float)
        y = E * y + alpha * g_old + beta * g_new
        values.append(y.copy())
        g_old = g_new
    return values

def _solid_norm(y: np.ndarray, mass) -> float:
    x = np.asarray(y, dtype=float).ravel()
    return float(np.sqrt(max(x @ (mass @ x), 0.0)))

def _time_grid(t_end: float, dt: float) -> np.ndarray:
    n = max(int(round(t_end / dt)), 1)
    return np.linspace(0.0, t_end, n + 1)

def lemma_key_trial(
        mesh,
        c: ElasticityTensor,
        u0: np.ndarray,
        g: Callable[[float], np.ndarray],
        eps_list: Sequence[float],
        t_end: float,
        dt: float,
    ) -> LemmaKeyReport:
    """
    sup_t |L(u)(t)| for every eps against the eps-free bound |g|_{L^inf L^2} + |L(u0)|.

    Norms are solid L2 norms with the consistent mass. The integration tolerance
    is the largest difference between the dt and dt/2 integrations on the
    common grid points.

    Parameters:
        g (Callable): t -> nodal solid field (n_nodes, d).

    Raises:
        ValueError: If some eps is not positive.
    """
    if any(not eps > 0 for eps in eps_list):
        raise ValueError(f"Invalid eps values {list(eps_list)}, all must be positive")
    mass = assemble_mass(mesh, mesh.cells_of(Phase.Solid), mesh.dimension)
    y0 = linear_L(u0, c, mesh).values
    coarse = _time_grid(t_end, dt)
    fine = _time_grid(t_end, dt / 2.0)
    g_sup = max(_solid_norm(g(t), mass) for t in fine)
    bound = g_sup + _solid_norm(y0, mass)

    sup_norms, tolerance = [], 0.0
    for eps in eps_list:
        values = integrate_relaxation(y0, g, eps, coarse)
        refined = integrate_relaxation(y0, g, eps, fine)
        sup_norms.append(max(_solid_norm(y, mass) for y in values))
        difference = max(_solid_norm(y - refined[2 * n], mass) for n, y in enumerate(values))
        tolerance = max(tolerance, difference)
    return LemmaKeyReport(
        eps_values=list(eps_list),
        sup_norms=sup_norms,
        bound=bound,
        slack=[bound - s for s in sup_norms],
        integration_tolerance=tolerance,
        valid=bool(tolerance <= 0.01 * bound),
    )

def random_profile(mesh, rng: np.random.Generator) -> Callable[[float], np.ndarray]:
    """g(t) = sin(t) phi with phi random on the solid nodes."""
    phi = np.zeros((mesh.n_nodes, mesh.dimension))
    nodes = mesh.nodes_of(Phase.Solid)
    phi[nodes] = rng.standard_normal((len(nodes), mesh.dimension))
    return lambda t: np.sin(t) * phi

def lemma_key_suite(
        mesh,
        c: ElasticityTensor,
        u0: np.ndarray,
        eps_list: Sequence[float],
        t_end: float,
        dt: float,
        trials: int = 3,
        seed: int = 0,
        verbose: bool = False,
    ) -> List[LemmaKeyReport]:
    """Trials with random oscillating profiles drawn from one seeded generator."""
    rng = np.random.default_rng(seed)
    reports = []
    for trial in range(trials):
        report = lemma_key_trial(mesh, c, u0, random_profile(mesh, rng), eps_list, t_end, dt)
        if verbose:
            print(f"{LEMMA_COLOR}trial {trial}: bound={report.bound:.6e} min slack={min(report.slack):.3e}{Style.RESET_ALL}")
        reports.append(report)
    return reports

def solid_mode(mesh, c: ElasticityTensor) -> Tuple[float, np.ndarray]:
    """
    The lowest non-rigid generalized eigenpair A phi = lam M phi of the solid,
    phi M-normalized and returned as a nodal field.

    Raises:
        ExperimentError: If the solid has no non-rigid mode.
    """
    d = mesh.dimension
    nodes = mesh.nodes_of(Phase.Solid)
    dofs = (nodes[:, None] * d + np.arange(d)).ravel()
    A = stiffness_L(c, mesh)[dofs][:, dofs].toarray()
    M = assemble_mass(mesh, mesh.cells_of(Phase.Solid), d)[dofs][:, dofs].toarray()
    eigenvalues, vectors = scipy.linalg.eigh(0.5 * (A + A.T), 0.5 * (M + M.T))
    positive = np.flatnonzero(eigenvalues > 1e-8 * eigenvalues.max())
    if len(positive) == 0:
        raise ExperimentError("The solid has no non-rigid elastic mode")
    index = positive[0]
    phi = np.zeros((mesh.n_nodes, d))
    phi[nodes] = vectors[:, index].reshape(len(nodes), d)
    return float(eigenvalues[index]), phi

def scalar_mode_check(mesh, c: ElasticityTensor, g0: float, eps_list: Sequence[float], t_end: float, dt: float) -> Dict[str, float]:
    """
    Compare the field integration for g = g0 phi, u0 = 0 with y(t) = g0 (1 - exp(-t/eps)) phi.

    Returns:
        Dict[str, float]: The eigenvalue, the largest field error and the eigen-residual of phi.
    """
    eigenvalue, phi = solid_mode(mesh, c)
    mass = assemble_mass(mesh, mesh.cells_of(Phase.Solid), mesh.dimension)
    times = _time_grid(t_end, dt)
    error = 0.0
    for eps in eps_list:
        values = integrate_relaxation(np.zeros_like(phi), lambda t: g0 * phi, eps, times)
        for t, y in zip(times, values):
            exact = g0 * -np.expm1(-t / eps) * phi
            error = max(error, _solid_norm(y - exact, mass))
    A = stiffness_L(c, mesh)
    x = phi.ravel()
    residual = float(np.linalg.norm(A @ x - eigenvalue * (mass @ x)) / max(eigenvalue * np.linalg.norm(mass @ x), 1e-300))
    return {"eigenvalue": eigenvalue, "max_error": error, "eigen_residual": residual}
