import numpy as np
import pytest

from lagrangefsi.core.datatypes import Phase, SolverParams
from lagrangefsi.core.exceptions import MeshError
from lagrangefsi.compat.checker import check_compatibility, tangential
from lagrangefsi.compat.forcing import ConstantForce, ZeroForce
from lagrangefsi.compat.hierarchy import (
    CompatData,
    build_compat,
    build_q0,
    build_w1,
    forcing_jet,
    solve_pressure,
)
from lagrangefsi.compat.initial_data import solid_bump
from lagrangefsi.mesh.phase_mesh import GeometrySpec, SolidRegion, build_mesh

@pytest.fixture
def mesh():
    box = SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.75, 0.75))
    return build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.125, solids=[box]))

@pytest.fixture
def params():
    return SolverParams()

def test_zero_data_gives_zero_hierarchy(mesh, params):
    compat = build_compat(np.zeros((mesh.n_nodes, 2)), ZeroForce(2), mesh, params)
    for name in ("u0", "w1", "w2", "w3", "q0", "q1", "q2"):
        assert np.all(getattr(compat, name) == 0.0)
    assert compat.profile is not None
    report = check_compatibility(compat, ZeroForce(2), mesh, params)
    assert report.compatible
    assert all(value == 0.0 for value in report.member_norms.values())

def test_compat_data_zero_and_pressure(mesh):
    compat = CompatData.zero(mesh)
    compat.q1[:] = 2.0
    compat.q2[:] = 4.0
    assert np.allclose(compat.pressure(0.5), 2.0 * 0.5 + 0.5 * 0.25 * 4.0)
    assert compat.profile is None

def test_q0_takes_the_interface_values(mesh, params):
    q0 = build_q0(np.zeros((mesh.n_nodes, 2)), ZeroForce(2), mesh, params, dirichlet=lambda x: np.ones(len(x)))
    assert np.allclose(q0[mesh.nodes_of(Phase.Fluid)], 1.0, atol=1e-8)
    solid_only = mesh.node_in_solid & ~mesh.node_in_fluid
    assert np.all(q0[solid_only] == 0.0)

def test_w1_is_the_force_on_the_solid(mesh, params):
    f = ConstantForce([0.0, -1.0])
    u0 = np.zeros((mesh.n_nodes, 2))
    q0 = build_q0(u0, f, mesh, params)
    w1 = build_w1(u0, q0, f, mesh, params)
    assert np.allclose(w1[mesh.nodes_of(Phase.Solid)], [0.0, -1.0])

def test_pressure_needs_an_interface(params):
    container = build_mesh(GeometrySpec(dimension=2, extent=(1.0, 1.0), h=0.25), require_solid=False)
    with pytest.raises(MeshError):
        solve_pressure(np.zeros((16, 9, 2)), np.zeros((16, 9)), np.zeros(0), container, params)

def test_forcing_jet_orders(mesh):
    f = ConstantForce([1.0, 2.0])
    x = mesh.nodes
    u0 = np.ones_like(x)
    assert np.allclose(forcing_jet(f, x, u0, u0, 0), [1.0, 2.0])
    assert np.allclose(forcing_jet(f, x, u0, u0, 1), 0.0)
    with pytest.raises(ValueError):
        forcing_jet(f, x, u0, u0, 3)

def test_bump_has_no_fluid_shear(mesh, params):
    compat = build_compat(solid_bump(mesh, 1e-2), ZeroForce(2), mesh, params)
    report = check_compatibility(compat, ZeroForce(2), mesh, params)
    assert report.c1_tangential == 0.0
    assert report.member_norms["u0"] > 0.0
    assert np.all(np.isfinite(list(report.violations.values())))

def test_tangential_part():
    normals = np.array([[0.0, 1.0]])
    assert np.allclose(tangential(np.array([[3.0, 4.0]]), normals), [[3.0, 0.0]])
