import pytest
from pydantic import ValidationError

from lagrangefsi.readers.config import DataConfig, NumericsConfig, RunConfig, describe_defaults

def test_solver_params_follow_the_sections():
    config = RunConfig().replace(physics={"nu": 2.0}, numerics={"kappa": 0.5, "freeze_cofactor": True})
    params = config.solver_params()
    assert params.nu == 2.0
    assert params.kappa == 0.5
    assert params.freeze_cofactor
    assert params.dt == config.numerics.dt

def test_replace_validates():
    config = RunConfig()
    assert config.replace(numerics={"t_end": 1.0}).numerics.t_end == 1.0
    assert config.numerics.t_end == 0.2
    with pytest.raises(ValidationError):
        config.replace(numerics={"dt": 1.0})
    with pytest.raises(ValueError):
        config.replace(solver={"kappa": 1.0})

def test_geometry_defaults_scale_with_the_extent():
    config = RunConfig.model_validate({"geometry": {"extent": "2.0, 1.0", "h": 0.125}})
    spec = config.geometry_spec()
    assert spec.extent == (2.0, 1.0)
    assert spec.solids[0].lower == (0.5, 0.25)
    assert spec.solids[0].upper == (1.5, 0.75)

def test_file_preset_needs_a_file():
    with pytest.raises(ValidationError):
        DataConfig(initial_data="file")
    assert DataConfig(initial_data="file", initial_data_file="u0.txt").initial_data_file == "u0.txt"

def test_dt_may_not_exceed_t_end():
    with pytest.raises(ValidationError):
        NumericsConfig(t_end=0.1, dt=0.2)

def test_describe_defaults():
    text = describe_defaults()
    for section in ("geometry", "physics", "numerics", "data", "experiment", "output"):
        assert f"[{section}]" in text
    assert "  kappa = 0.01  (Artificial viscosity of the solid)" in text
    assert "box 0.25 0.25 0.75 0.75" in text
