import warnings
import numpy as np
import pytest

from lagrangefsi.core.datatypes import Phase, PointRule
from lagrangefsi.core.exceptions import InjectivityWarning, PhaseMismatchError
from lagrangefsi.kinematics.fields import (
    cofactor,
    gradient,
    identity_configuration,
    jacobian_det,
    strain_offset,
)
from lagrangefsi.kinematics.recovery import at_points, nodal_gradient, nodal_laplacian
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25, solids=[box]))

@pytest.fixture
def container():
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.125), require_solid=False)

def test_identity_configuration(mesh):
    X = identity_configuration(mesh)
    F = gradient(X, mesh)
    assert F.values.shape == (mesh.n_cells, 9, 2, 2)
    assert np.allclose(F.values, np.eye(2))
    assert np.allclose(cofactor(F).values, np.eye(2))
    assert np.allclose(jacobian_det(F).values, 1.0)
    assert np.allclose(strain_offset(F).values, 0.0)

def test_affine_configuration_is_reproduced(mesh):
    A = np.array([[1.2, 0.3], [-0.1, 0.9]])
    eta = mesh.nodes @ A.T + np.array([0.1, -0.2])
    F = gradient(eta, mesh, Phase.Solid, PointRule.Center)
    assert F.values.shape == (4, 1, 2, 2)
    assert np.allclose(F.values, A)
    assert np.allclose(jacobian_det(F).values, np.linalg.det(A))
    assert np.allclose(cofactor(F).values, np.linalg.det(A) * np.linalg.inv(A))

def test_gradient_needs_values_on_the_phase(mesh):
    eta = identity_configuration(mesh)
    fluid_only = np.setdiff1d(mesh.nodes_of(Phase.Fluid), mesh.nodes_of(Phase.Solid))
    eta[fluid_only] = np.nan
    assert np.allclose(gradient(eta, mesh, Phase.Solid).values, np.eye(2))
    with pytest.raises(PhaseMismatchError):
        gradient(eta, mesh, Phase.Fluid)
    with pytest.raises(PhaseMismatchError):
        gradient(np.zeros((3, 2)), mesh)
    with pytest.raises(PhaseMismatchError):
        gradient(np.zeros((mesh.n_nodes, 3)), mesh)

def test_reflection_warns(mesh):
    eta = mesh.nodes * np.array([-1.0, 1.0])
    F = gradient(eta, mesh)
    with pytest.warns(InjectivityWarning):
        det = jacobian_det(F)
    assert np.allclose(det.values, -1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        jacobian_det(F, warn=False)

def test_at_points_interpolates_linear_fields(mesh):
    field = mesh.nodes[:, 0] + 2.0 * mesh.nodes[:, 1]
    cells = np.arange(mesh.n_cells)
    points = mesh.points(cells, PointRule.Gauss)
    assert np.allclose(at_points(field, mesh, cells), points[..., 0] + 2.0 * points[..., 1])

def test_recovered_gradient_of_linear_field(container):
    field = 3.0 * container.nodes[:, 0] - container.nodes[:, 1]
    G = nodal_gradient(field, container, Phase.Both)
    assert np.allclose(G, [3.0, -1.0])

def test_recovered_laplacian_of_quadratic(container):
    field = container.nodes[:, 0] ** 2 + container.nodes[:, 1] ** 2
    laplacian = nodal_laplacian(field, container, Phase.Both)
    interior = container.interior_nodes(Phase.Both, depth=2)
    assert interior.sum() == 25
    assert np.allclose(laplacian[interior], 4.0)
