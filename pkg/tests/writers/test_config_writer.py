import numpy as np
import pytest

from lagrangefsi.mesh.phase_mesh import SolidRegion
from lagrangefsi.readers.config import RunConfig
from lagrangefsi.readers.config_reader import ConfigReader, parse_config
from lagrangefsi.writers.config_writer import CONFIG_ECHO_FILENAME, emit_config, format_value, write_config

NAMES = ["results", "results#1", "run \"a\" # b", " padded ", "C:\\runs\\k", "two\nlines", "#"]

def random_config(rng: np.random.Generator) -> RunConfig:
    t_end = float(rng.uniform(0.05, 1.0))
    return RunConfig.model_validate({
        "geometry": {"h": float(rng.choice([0.25, 0.125, 0.0625]))},
        "physics": {"nu": float(rng.uniform(0.1, 10.0)), "lam": float(rng.uniform(0.1, 10.0))},
        "numerics": {
            "kappa": float(10.0 ** rng.uniform(-5, 0)),
            "eps_pen": float(10.0 ** rng.uniform(-6, -1)),
            "t_end": t_end,
            "dt": t_end / int(rng.integers(1, 200)),
            "freeze_cofactor": bool(rng.integers(0, 2)),
            "checkpoint_every": int(rng.integers(0, 10)),
        },
        "data": {
            "initial_data": str(rng.choice(["zero", "solid_bump", "fluid_swirl"])),
            "forcing": str(rng.choice(["zero", "gravity", "pulse"])),
            "amplitude": float(rng.uniform(0.0, 0.1)),
            "initial_data_file": str(rng.choice(NAMES)),
        },
        "experiment": {"kappa_list": [float(x) for x in 10.0 ** rng.uniform(-4, -1, int(rng.integers(1, 5)))]},
        "output": {"seed": int(rng.integers(0, 1000)), "directory": str(rng.choice(NAMES))},
    })

@pytest.mark.parametrize("seed", range(5))
def test_emitted_config_parses_back(seed):
    config = random_config(np.random.default_rng(seed))
    assert ConfigReader().parse(emit_config(config)) == config

def test_format_value():
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.1"
    assert format_value([1e-05, 0.5]) == "1e-05, 0.5"
    boxes = [SolidRegion(kind="box", lower=(0.25, 0.25), upper=(0.5, 0.5)), SolidRegion(kind="ball", center=(0.75, 0.75), radius=0.125)]
    assert format_value(boxes) == "box 0.25 0.25 0.5 0.5; ball 0.75 0.75 0.125"
    assert format_value(7) == "7"

def test_none_keys_are_omitted():
    text = emit_config(RunConfig())
    assert "initial_data_file" not in text
    assert text.startswith("[geometry]\n")
    assert "\n\n[physics]\n" in text

def test_write_config(tmp_path):
    config = RunConfig().replace(output={"directory": str(tmp_path)})
    path = write_config(config, str(tmp_path))
    assert path.endswith(CONFIG_ECHO_FILENAME)
    assert parse_config(path) == config

@pytest.mark.parametrize("name", NAMES)
def test_string_values_survive_the_round_trip(name):
    config = RunConfig().replace(output={"directory": name}, data={"initial_data_file": name})
    parsed = ConfigReader().parse(emit_config(config))
    assert parsed.output.directory == name
    assert parsed.data.initial_data_file == name

def test_strings_are_quoted_only_when_needed():
    assert format_value("fsi_out") == "fsi_out"
    assert format_value("results#1") == '"results#1"'
    assert format_value('say "hi"') == '"say \\"hi\\""'
