import numpy as np
import pytest
import scipy.sparse as sp

from lagrangefsi.core.exceptions import JacobianMismatchError, NewtonError
from lagrangefsi.solvers.newton import check_jacobian, solve_newton

def test_scalar_root():
    root, report = solve_newton(lambda x: x ** 2 - 2.0, lambda x: 2.0 * x, 1.0, tol=1e-12)
    assert isinstance(root, float)
    assert np.isclose(root, np.sqrt(2.0))
    assert report.converged
    assert report.iterations <= 6

def test_vector_system_with_sparse_jacobian():
    residual = lambda x: np.array([x[0] + x[1] - 3.0, x[0] * x[1] - 2.0])
    jacobian = lambda x: sp.csr_matrix([[1.0, 1.0], [x[1], x[0]]])
    x, report = solve_newton(residual, jacobian, np.array([0.5, 2.5]), fd_check=True)
    assert report.converged
    assert np.allclose(np.sort(x), [1.0, 2.0])

def test_converged_guess_needs_no_iteration():
    x, report = solve_newton(lambda x: x - 1.0, lambda x: np.eye(1), np.array([1.0]))
    assert report.iterations == 0
    assert report.converged

def test_not_converged_returns_best_iterate():
    _, report = solve_newton(lambda x: np.arctan(x), lambda x: 1.0 / (1.0 + x ** 2), 1.0, tol=1e-300, maxit=2)
    assert not report.converged
    assert report.iterations == 2

def test_singular_jacobian():
    with pytest.raises(NewtonError):
        solve_newton(lambda x: x ** 2 + 1.0, lambda x: np.zeros((1, 1)), np.array([0.0]))

def test_non_finite_residual():
    with pytest.raises(NewtonError):
        solve_newton(lambda x: np.nan * x, lambda x: np.eye(1), 1.0)

def test_check_jacobian_detects_wrong_derivative():
    residual = lambda x: np.sin(x)
    assert check_jacobian(residual, lambda x: np.diag(np.cos(x)), np.array([0.3, 0.4])) < 1e-6
    with pytest.raises(JacobianMismatchError):
        check_jacobian(residual, lambda x: np.diag(2.0 * np.cos(x)), np.array([0.3, 0.4]))

def test_quadratic_from_three():
    root, report = solve_newton(lambda x: x ** 2 - 4.0, lambda x: 2.0 * x, 3.0, tol=1e-12)
    assert report.converged
    assert np.isclose(root, 2.0, atol=1e-12)
    assert 3 <= report.iterations <= 6
