import numpy as np
import pytest

from lagrangefsi.core.exceptions import ConfigValidationError
from lagrangefsi.readers.field_reader import FieldReader

def test_reads_a_nodal_field(tmp_path):
    path = tmp_path / "u0.txt"
    path.write_text("# u v\n0.0 1.0\n2.0 3.0\n0.5 -0.5\n", encoding="utf-8")
    values = FieldReader(3, 2)(str(path))
    assert values.shape == (3, 2)
    assert np.array_equal(values[1], [2.0, 3.0])

@pytest.mark.parametrize(
    "content",
    [
        "0.0 1.0\n2.0 3.0\n",
        "0.0 1.0 2.0\n2.0 3.0 4.0\n0.5 0.5 0.5\n",
        "0.0 1.0\n2.0 nan\n0.5 0.5\n",
        "0.0 1.0\n2.0 x\n0.5 0.5\n",
    ],
)
def test_rejects_bad_fields(tmp_path, content):
    path = tmp_path / "u0.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigValidationError) as info:
        FieldReader(3, 2).read(str(path))
    assert info.value.field == "data.initial_data_file"

def test_missing_file(tmp_path):
    with pytest.raises(ConfigValidationError):
        FieldReader(3, 2).read(str(tmp_path / "missing.txt"))
