from abc import ABC, abstractmethod
from typing import Any

class Reader(ABC):

    @abstractmethod
    def read(self, filepath: str) -> Any:
        raise NotImplementedError(f"Reader {type(self).__name__} is missing the required 'read' method.")

    def __call__(self, filepath: str) -> Any:
        return self.read(filepath)
