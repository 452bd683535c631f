import numpy as np
import pytest

from lagrangefsi.core.exceptions import ExperimentError
from lagrangefsi.experiments.mms import fitted_rate, mms_convergence, rate_table

def test_fitted_rate_of_a_power_law():
    levels = [0.1, 0.05, 0.025]
    assert np.isclose(fitted_rate(levels, [3.0 * h ** 2 for h in levels]), 2.0)
    assert np.isclose(fitted_rate(levels, [h for h in levels]), 1.0)

def test_fitted_rate_edge_cases():
    assert np.isnan(fitted_rate([0.1, 0.05], [1.0, 0.0]))
    with pytest.raises(ExperimentError):
        fitted_rate([0.1], [1.0])

def test_rate_table():
    table = rate_table("temporal", "dt", [0.02, 0.01, 0.005], [4.0, 2.0, 1.0])
    assert table.variable == "dt"
    assert [row.level for row in table.rows] == [0.02, 0.01, 0.005]
    assert np.isclose(table.rate, 1.0)
    assert table.monotone
    assert not rate_table("spatial", "h", [0.2, 0.1, 0.05], [1.0, 2.0, 0.5]).monotone

def test_invalid_ladders():
    with pytest.raises(ValueError):
        mms_convergence("acoustic")
    with pytest.raises(ValueError):
        mms_convergence("temporal", levels=[0.02, 0.01])
