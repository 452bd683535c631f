import numpy as np
import pytest

from lagrangefsi.core.datatypes import Phase
from lagrangefsi.core.exceptions import PhaseMismatchError
from lagrangefsi.kinematics.fields import cofactor, gradient
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh
from lagrangefsi.operators.assembly import assemble_gradient_load, lumped_mass
from lagrangefsi.operators.fluid import fluid_viscous, lagrangian_div, pressure_term

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.125, solids=[box]))

@pytest.fixture
def a(mesh):
    return cofactor(gradient(mesh.nodes.copy(), mesh))

def test_lagrangian_div_at_identity(mesh, a):
    v = np.stack([mesh.nodes[:, 0], 2.0 * mesh.nodes[:, 1]], axis=1)
    div = lagrangian_div(a, v)
    assert np.allclose(div.values, 3.0)

def test_lagrangian_div_of_rotation_is_zero(mesh, a):
    v = np.stack([-mesh.nodes[:, 1], mesh.nodes[:, 0]], axis=1)
    assert np.allclose(lagrangian_div(a, v).values, 0.0)

def test_viscous_term_kills_constants(mesh, a):
    v = np.tile([0.3, -0.7], (mesh.n_nodes, 1))
    out = fluid_viscous(a, v, mesh, nu=2.0)
    assert out.phase == Phase.Fluid
    assert np.allclose(out.weak, 0.0)

def test_viscous_term_is_positive(mesh, a):
    rng = np.random.default_rng(3)
    v = rng.standard_normal((mesh.n_nodes, 2))
    out = fluid_viscous(a, v, mesh)
    assert np.sum(out.weak * v) > 0.0

def test_pressure_term_of_constant_pressure(mesh, a):
    q = np.where(np.isin(np.arange(mesh.n_cells), mesh.cells_of(Phase.Fluid)), 1.5, 0.0)
    out = pressure_term(a, q)
    V = np.tile([1.5, 0.0], (len(mesh.cells_of(Phase.Fluid)), 9, 1))
    expected = assemble_gradient_load(V, mesh, mesh.cells_of(Phase.Fluid))
    assert np.allclose(out.weak[:, 0], expected)

def test_pressure_term_pairs_with_divergence(mesh, a):
    rng = np.random.default_rng(4)
    q = rng.standard_normal(mesh.n_cells)
    v = rng.standard_normal((mesh.n_nodes, 2))
    weak = pressure_term(a, q).weak
    div = lagrangian_div(a, v).values
    fluid = mesh.cells_of(Phase.Fluid)
    weights = mesh.weights("gauss")
    assert np.isclose(np.sum(weak * v), np.sum(weights * q[fluid][:, None] * div[fluid]))

def test_pressure_shape_is_checked(mesh, a):
    with pytest.raises(PhaseMismatchError):
        pressure_term(a, np.zeros(3))
    q = np.zeros(mesh.n_cells)
    q[mesh.cells_of(Phase.Fluid)[0]] = np.nan
    with pytest.raises(PhaseMismatchError):
        pressure_term(a, q)

def test_cofactor_must_cover_the_fluid(mesh):
    solid_only = cofactor(gradient(mesh.nodes.copy(), mesh, Phase.Solid))
    with pytest.raises(PhaseMismatchError):
        fluid_viscous(solid_only, np.zeros((mesh.n_nodes, 2)), mesh)

def test_lumped_mass_sums_to_area(mesh):
    assert np.isclose(lumped_mass(mesh, mesh.cells_of(Phase.Both)).sum(), 1.0)
    assert np.isclose(lumped_mass(mesh, mesh.cells_of(Phase.Solid)).sum(), 0.25)
