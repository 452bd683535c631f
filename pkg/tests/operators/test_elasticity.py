import numpy as np
import pytest
from pydantic import ValidationError

from lagrangefsi.core.datatypes import Phase
from lagrangefsi.core.exceptions import MeshError, PhaseMismatchError
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.operators.elasticity import (
    ElasticityTensor,
    c_eval,
    linear_L,
    nonlinear_N,
    stiffness_L,
    svk_stress,
    svk_tangent,
    traction_G,
)

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.125, solids=[box]))

@pytest.fixture
def c():
    return ElasticityTensor(lam=2.0, mu=0.5, dimension=2)

def test_c_eval_entries():
    c = ElasticityTensor(lam=2.0, mu=0.5)
    assert c_eval(1, 1, 1, 1, c) == 3.0
    assert c_eval(1, 1, 2, 2, c) == 2.0
    assert c_eval(1, 2, 1, 2, c) == 0.5
    assert c_eval(1, 2, 3, 1, c) == 0.0
    with pytest.raises(ValueError):
        c.c_eval(0, 1, 1, 1)
    with pytest.raises(ValueError):
        c.c_eval(1, 1, 1, 4)

def test_c_symmetries():
    tensor = ElasticityTensor(lam=1.3, mu=0.7).tensor()
    assert np.array_equal(tensor, tensor.transpose(1, 0, 2, 3))
    assert np.array_equal(tensor, tensor.transpose(0, 1, 3, 2))
    assert np.array_equal(tensor, tensor.transpose(2, 3, 0, 1))

def test_c_rejects_invalid_constants():
    with pytest.raises(ValidationError):
        ElasticityTensor(lam=-1.0, mu=1.0)
    with pytest.raises(ValidationError):
        ElasticityTensor(lam=1.0, mu=1.0, dimension=1)

def test_contract_matches_tensor(c):
    G = np.array([[0.3, -0.2], [0.5, 0.1]])
    assert np.allclose(c.contract(G), np.einsum("ijkl,kl->ij", c.tensor(), G))
    assert np.isclose(c.energy_density(np.eye(2)), 0.25 * 2 * (2.0 * 2 + 2 * 0.5))

def test_svk_tangent_matches_differences(c):
    rng = np.random.default_rng(1)
    F = np.eye(2) + 0.2 * rng.standard_normal((2, 2))
    T = svk_tangent(F, c)
    step = 1e-6
    for m in range(2):
        for n in range(2):
            E = np.zeros((2, 2))
            E[m, n] = step
            difference = (svk_stress(F + E, c) - svk_stress(F - E, c)) / (2.0 * step)
            assert np.allclose(T[..., m, n], difference, atol=1e-7)
    assert np.allclose(svk_stress(np.eye(2), c), 0.0)

def test_stiffness_symmetric_and_kills_rigid_motions(mesh, c):
    A = stiffness_L(c, mesh)
    scale = abs(A).max()
    assert abs(A - A.T).max() <= 1e-12 * scale
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    for u in (np.tile([1.0, 0.0], (mesh.n_nodes, 1)), np.stack([-y, x], axis=1)):
        assert np.abs(A @ u.ravel()).max() <= 1e-12 * scale * mesh.n_nodes

def test_stiffness_nonnegative(mesh, c):
    A = stiffness_L(c, mesh)
    rng = np.random.default_rng(2)
    for _ in range(5):
        u = rng.standard_normal(A.shape[0])
        assert u @ (A @ u) >= -1e-12 * abs(A).max()

def test_linear_L_weak_matches_stiffness(mesh, c):
    u = np.stack([np.sin(mesh.nodes[:, 0]), mesh.nodes[:, 0] * mesh.nodes[:, 1]], axis=1)
    out = linear_L(u, c, mesh)
    assert out.phase == Phase.Solid
    assert np.allclose(out.weak.ravel(), -(stiffness_L(c, mesh) @ u.ravel()))

def test_linear_L_ignores_fluid_values(mesh, c):
    u = np.zeros((mesh.n_nodes, 2))
    fluid_only = np.setdiff1d(mesh.nodes_of(Phase.Fluid), mesh.nodes_of(Phase.Solid))
    u[fluid_only] = np.nan
    assert np.allclose(linear_L(u, c, mesh).weak, 0.0)
    with pytest.raises(PhaseMismatchError):
        linear_L(np.zeros((mesh.n_nodes, 3)), c, mesh)

def test_N_vanishes_at_identity(mesh, c):
    out = nonlinear_N(mesh.nodes.copy(), c, mesh)
    assert np.allclose(out.weak, 0.0)
    assert np.allclose(out.values, 0.0)
    assert np.allclose(traction_G(mesh.nodes.copy(), c, mesh).mean, 0.0)

def test_N_linearizes_to_minus_L(mesh, c):
    u = np.stack([np.sin(mesh.nodes[:, 1]), mesh.nodes[:, 0] ** 2], axis=1)
    eps = 1e-6
    dN = (nonlinear_N(mesh.nodes + eps * u, c, mesh).weak - nonlinear_N(mesh.nodes - eps * u, c, mesh).weak) / (2.0 * eps)
    L = linear_L(u, c, mesh).weak
    assert np.abs(dN + L).max() <= 1e-6 * np.abs(L).max()

def test_traction_of_uniform_stretch(mesh, c):
    stretch = 1.1
    out = traction_G(stretch * mesh.nodes, c, mesh)
    P = svk_stress(stretch * np.eye(2), c)
    assert np.allclose(out.mean, out.normals @ P.T)
    assert out.values.shape == (mesh.n_facets, 3, 2)

def test_traction_needs_interface():
    container = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25), require_solid=False)
    c = ElasticityTensor(lam=1.0, mu=1.0, dimension=2)
    with pytest.raises(MeshError):
        traction_G(container.nodes.copy(), c, container)
