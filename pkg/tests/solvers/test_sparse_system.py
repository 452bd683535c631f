import numpy as np
import pytest
import scipy.sparse as sp

from lagrangefsi.core.exceptions import NotSPDError, SolverError
from lagrangefsi.solvers import sparse_system
from lagrangefsi.solvers.sparse_system import SparseSystem, check_spd, solve_spd

def laplacian_1d(n):
    return sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]).tocsr()

def test_solve_spd():
    A = laplacian_1d(50)
    x_true = np.linspace(0.0, 1.0, 50) ** 2
    x, report = solve_spd(SparseSystem(matrix=A, rhs=A @ x_true), tol=1e-12)
    assert report.converged
    assert np.allclose(x, x_true, atol=1e-8)

def test_dirichlet_values_are_imposed():
    A = laplacian_1d(20)
    system = SparseSystem(matrix=A, rhs=np.zeros(20), dirichlet_dofs=np.array([0, 19]), dirichlet_values=np.array([1.0, 2.0]))
    x, report = solve_spd(system)
    assert report.converged
    assert x[0] == 1.0 and x[19] == 2.0
    # the discrete solution is linear between the prescribed values
    assert np.allclose(np.diff(x, 2), 0.0, atol=1e-8)

def test_zero_rhs():
    x, report = solve_spd(SparseSystem(matrix=laplacian_1d(5), rhs=np.zeros(5)))
    assert report.iterations == 0
    assert np.all(x == 0.0)

def test_active_dofs():
    A = sp.identity(4, format="csr") * 2.0
    system = SparseSystem(matrix=A, rhs=np.array([2.0, 4.0, 6.0, 8.0]), active_dofs=np.array([1, 2]))
    x, _ = solve_spd(system)
    assert np.allclose(x, [0.0, 2.0, 3.0, 0.0])

def test_non_symmetric_matrix_rejected():
    A = sp.csr_matrix([[2.0, 1.0], [0.0, 2.0]])
    with pytest.raises(NotSPDError):
        check_spd(A)
    with pytest.raises(SolverError):
        solve_spd(SparseSystem(matrix=A, rhs=np.ones(2)))

def test_nonpositive_diagonal_rejected():
    with pytest.raises(NotSPDError):
        check_spd(sp.csr_matrix([[1.0, 0.0], [0.0, -1.0]]))

def test_system_flagged_indefinite():
    with pytest.raises(NotSPDError):
        solve_spd(SparseSystem(matrix=laplacian_1d(3), rhs=np.ones(3), spd=False))

def test_identity_in_one_iteration():
    b = np.array([1.0, -2.0, 3.0, 0.5])
    x, report = solve_spd(SparseSystem(matrix=sp.identity(4, format="csr"), rhs=b))
    assert report.converged
    assert report.iterations == 1
    assert np.allclose(x, b)

def test_poisson_1d_converges_at_second_order():
    errors, sizes = [], []
    for n in (16, 32, 64):
        h = 1.0 / n
        nodes = np.linspace(0.0, 1.0, n + 1)[1:-1]
        A = laplacian_1d(n - 1) / h ** 2
        x, report = solve_spd(SparseSystem(matrix=A, rhs=np.sin(np.pi * nodes)), tol=1e-13)
        assert report.converged
        errors.append(np.max(np.abs(x - np.sin(np.pi * nodes) / np.pi ** 2)))
        sizes.append(h)
    rate = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
    assert abs(rate - 2.0) < 0.05

def test_indefinite_matrix_rejected():
    A = sp.csr_matrix([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NotSPDError):
        check_spd(A)
    with pytest.raises(NotSPDError):
        solve_spd(SparseSystem(matrix=A, rhs=np.ones(2)))

def test_indefinite_curvature_caught_by_cg(monkeypatch):
    monkeypatch.setattr(sparse_system, "DENSE_SPD_LIMIT", 0)
    A = sp.csr_matrix([[1.0, 2.0], [2.0, 1.0]])
    check_spd(A)
    with pytest.raises(NotSPDError):
        solve_spd(SparseSystem(matrix=A, rhs=np.array([1.0, 0.0])))
