import numpy as np

from lagrangefsi.core.exceptions import ConfigValidationError
from lagrangefsi.readers.reader import Reader

class FieldReader(Reader):
    """Reads nodal vector fields: one node per line, whitespace-separated components, `#` comments."""

    def __init__(self, n_nodes: int, dimension: int):
        self.n_nodes = n_nodes
        self.dimension = dimension

    def read(self, filepath: str) -> np.ndarray:
        try:
            values = np.loadtxt(filepath, comments="#", ndmin=2, dtype=float)
        except (OSError, ValueError) as e:
            raise ConfigValidationError(f"Cannot read nodal field '{filepath}': {e}", field="data.initial_data_file")
        if values.shape != (self.n_nodes, self.dimension):
            raise ConfigValidationError(
                f"Nodal field '{filepath}' has shape {values.shape}, expected ({self.n_nodes}, {self.dimension})",
                field="data.initial_data_file",
            )
        if not np.all(np.isfinite(values)):
            raise ConfigValidationError(f"Nodal field '{filepath}' has non-finite values", field="data.initial_data_file")
        return values
