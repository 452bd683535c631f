import warnings
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve, MatrixRankWarning
from typing import Callable, Tuple, Union
from colorama import Fore, Style

from lagrangefsi.core.datatypes import SolveReport
from lagrangefsi.core.exceptions import NewtonError, JacobianMismatchError

NEWTON_COLOR = f"{Fore.BLUE}"

def _residual(residual_fn: Callable, x: np.ndarray) -> np.ndarray:
    r = np.atleast_1d(np.asarray(residual_fn(x), dtype=float)).ravel()
    if not np.all(np.isfinite(r)):
        raise NewtonError("Residual evaluation returned a non-finite value")
    return r

def _linear_solve(J, r: np.ndarray) -> np.ndarray:
    if sp.issparse(J):
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            try:
                dx = spsolve(sp.csc_matrix(J), r)
            except MatrixRankWarning:
                raise NewtonError("Jacobian is singular")
    else:
        try:
            dx = np.linalg.solve(np.atleast_2d(np.asarray(J, dtype=float)), r)
        except np.linalg.LinAlgError as e:
            raise NewtonError(f"Jacobian solve failed: {e}")
    dx = np.atleast_1d(dx)
    if not np.all(np.isfinite(dx)):
        raise NewtonError("Jacobian solve returned a non-finite update")
    return dx

def check_jacobian(residual_fn: Callable, jacobian_fn: Callable, x: np.ndarray, step: float = 1e-7, tol: float = 1e-5):
    """
    Compare the Jacobian callback with central finite differences at x.

    Raises:
        JacobianMismatchError: If the relative mismatch exceeds tol.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    J = jacobian_fn(x)
    J = J.toarray() if sp.issparse(J) else np.atleast_2d(np.asarray(J, dtype=float))
    J_fd = np.empty_like(J)
    for j in range(len(x)):
        e = np.zeros(len(x))
        e[j] = step
        J_fd[:, j] = (_residual(residual_fn, x + e) - _residual(residual_fn, x - e)) / (2.0 * step)
    mismatch = np.max(np.abs(J - J_fd)) / max(np.max(np.abs(J_fd)), 1.0)
    if mismatch > tol:
        raise JacobianMismatchError(f"Jacobian does not match finite differences (relative mismatch {mismatch:.3e})")
    return mismatch

def solve_newton(
        residual_fn: Callable,
        jacobian_fn: Callable,
        guess: Union[float, np.ndarray],
        tol: float = 1e-10,
        maxit: int = 25,
        fd_check: bool = False,
        verbose: bool = False,
    ) -> Tuple[Union[float, np.ndarray], SolveReport]:
    """
    Newton iteration x <- x - J(x)^-1 R(x) until |R(x)|_2 <= tol.

    Parameters:
        residual_fn (Callable): x -> R(x).
        jacobian_fn (Callable): x -> J(x), dense, sparse or scalar.
        guess: Initial iterate, scalar or 1D array.
        tol (float): Absolute tolerance on the residual 2-norm.
        maxit (int): Maximum number of Jacobian solves.
        fd_check (bool): Validate the Jacobian by finite differences at the guess.

    Returns:
        The converged iterate (or the best one) and its SolveReport.

    Raises:
        NewtonError: On a non-finite residual or a failed Jacobian solve.
    """
    scalar = np.ndim(guess) == 0
    x = np.atleast_1d(np.asarray(guess, dtype=float)).copy()
    r = _residual(residual_fn, x)
    if fd_check:
        check_jacobian(residual_fn, jacobian_fn, x)
    norm = float(np.linalg.norm(r))
    best_x, best_norm = x.copy(), norm
    iterations = 0
    while norm > tol and iterations < maxit:
        dx = _linear_solve(jacobian_fn(x), r)
        x = x - dx
        iterations += 1
        r = _residual(residual_fn, x)
        norm = float(np.linalg.norm(r))
        if verbose:
            print(f"{NEWTON_COLOR}  newton {iterations}: |R| = {norm:.3e}{Style.RESET_ALL}")
        if norm < best_norm:
            best_x, best_norm = x.copy(), norm
    converged = norm <= tol
    if not converged:
        x, norm = best_x, best_norm
    report = SolveReport(iterations=iterations, residual_norm=norm, converged=converged, tolerance=tol)
    return (float(x[0]) if scalar else x), report
