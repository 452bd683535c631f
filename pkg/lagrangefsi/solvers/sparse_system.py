import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigvalsh
from scipy.sparse.linalg import cg, LinearOperator
from typing import Any, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field

from lagrangefsi.core.datatypes import SolveReport
from lagrangefsi.core.exceptions import NotSPDError

DENSE_SPD_LIMIT = 1500

class SparseSystem(BaseModel):
    """A sparse linear system with strongly imposed Dirichlet values."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    matrix: Any = Field(description="Square sparse matrix over all dofs")
    rhs: np.ndarray = Field(description="Right-hand side over all dofs")
    dirichlet_dofs: np.ndarray = Field(description="Dofs with prescribed values", default_factory=lambda: np.zeros(0, dtype=int))
    dirichlet_values: np.ndarray = Field(description="Prescribed values", default_factory=lambda: np.zeros(0))
    active_dofs: Optional[np.ndarray] = Field(description="Dofs taking part in the system, all when None", default=None)
    spd: bool = Field(description="Whether the reduced matrix is symmetric positive definite", default=True)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def free_dofs(self) -> np.ndarray:
        active = np.arange(self.size) if self.active_dofs is None else np.asarray(self.active_dofs)
        return np.setdiff1d(active, self.dirichlet_dofs)

    def reduce(self) -> Tuple[sp.csr_matrix, np.ndarray]:
        """Eliminate the Dirichlet dofs: A_ff x_f = b_f - A_fD x_D."""
        A = sp.csr_matrix(self.matrix)
        free = self.free_dofs()
        A_ff = A[free][:, free]
        b = self.rhs[free]
        if len(self.dirichlet_dofs):
            b = b - A[free][:, self.dirichlet_dofs] @ self.dirichlet_values
        return A_ff.tocsr(), b

    def expand(self, x_free: np.ndarray) -> np.ndarray:
        x = np.zeros(self.size)
        x[self.free_dofs()] = x_free
        x[self.dirichlet_dofs] = self.dirichlet_values
        return x

def check_spd(A: sp.spmatrix):
    """
    SPD screening: symmetry up to rounding, a positive diagonal and, for systems
    up to DENSE_SPD_LIMIT unknowns, a positive smallest eigenvalue. Larger systems
    are watched for non-positive curvature while CG runs.

    Raises:
        NotSPDError: If the matrix is not symmetric or not positive definite.
    """
    scale = abs(A).max() if A.nnz else 0.0
    asymmetry = abs(A - A.T).max() if A.nnz else 0.0
    if asymmetry > 1e-12 * max(scale, 1e-300):
        raise NotSPDError(f"Matrix flagged SPD is not symmetric (asymmetry {asymmetry:.3e})")
    if np.any(A.diagonal() <= 0):
        raise NotSPDError("Matrix flagged SPD has a nonpositive diagonal entry")
    if 0 < A.shape[0] <= DENSE_SPD_LIMIT:
        smallest = float(eigvalsh(A.toarray(), subset_by_index=[0, 0])[0])
        if smallest <= 1e-12 * scale:
            raise NotSPDError(f"Matrix flagged SPD has the eigenvalue {smallest:.3e}")

def solve_spd(system: SparseSystem, tol: float = 1e-12, maxit: int = 10000, restarts: int = 3) -> Tuple[np.ndarray, SolveReport]:
    """
    Solve an SPD system with Jacobi-preconditioned conjugate gradients.

    Parameters:
        system (SparseSystem): The system to solve.
        tol (float): Requested relative residual |r|/|b| on the free dofs.
        maxit (int): Maximum number of iterations.

    Returns:
        Tuple[np.ndarray, SolveReport]: The full solution vector and the report.
        Exhausting `maxit` is reported with converged=False, not raised.
    """
    if not system.spd:
        raise NotSPDError("solve_spd requires a system flagged SPD")
    A, b = system.reduce()
    check_spd(A)
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return system.expand(np.zeros(len(b))), SolveReport(iterations=0, residual_norm=0.0, converged=True, tolerance=tol)

    inverse_diagonal = 1.0 / A.diagonal()
    preconditioner = LinearOperator(A.shape, matvec=lambda r: inverse_diagonal * r)
    iterations = 0
    x = np.zeros(len(b))
    previous = x

    def track(xk):
        # xk - x_prev = alpha p with alpha > 0 for SPD A, so s^T A s has the sign of p^T A p
        nonlocal iterations, previous
        iterations += 1
        s = xk - previous
        previous = xk.copy()
        curvature = float(s @ (A @ s))
        if curvature <= 0.0 and np.any(s):
            raise NotSPDError(f"Matrix flagged SPD shows curvature {curvature:.3e} at CG iteration {iterations}")

    residual = 1.0
    for _ in range(restarts + 1):
        previous = x.copy()
        x, _info = cg(A, b, x0=x, rtol=tol, atol=0.0, maxiter=max(maxit - iterations, 1), M=preconditioner, callback=track)
        residual = np.linalg.norm(b - A @ x) / b_norm
        if residual <= tol or iterations >= maxit:
            break
    report = SolveReport(iterations=iterations, residual_norm=float(residual), converged=bool(residual <= tol), tolerance=tol)
    return system.expand(x), report
