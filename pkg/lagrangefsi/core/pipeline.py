from typing import Any, Callable, Dict, Optional
from collections import OrderedDict
from colorama import Fore, Style

STAGE_COLOR = f"{Fore.MAGENTA}"

class Pipeline():
    """
    A class used to represent a pipeline of named stages.
    Each stage is a callable receiving the output of the previous one.
    It provides methods to add, remove, get, and clear stages, and to run the pipeline.
    """

    _stages: Dict[str, Optional[Callable[[Any], Any]]] = None
    _outputs: Dict[str, Any] = None

    def __init__(self, verbose: bool = False):
        self._stages = OrderedDict()
        self._outputs = OrderedDict()
        self.verbose = verbose

    def add(self, stage_name: str, stage: Callable[[Any], Any]):
        """
        Add a stage to the pipeline.

        Parameters:
            stage_name (str): The name of the stage.
            stage (Callable): The callable to be added to the pipeline.

        Raises:
            ValueError: If the stage is not callable or a stage with the same name already exists.
        """
        if not callable(stage):
            raise ValueError(f"Invalid {stage_name} stage provided, only callables accepted")
        if stage_name in self._stages:
            raise ValueError(f"Stage {stage_name} already exist.")
        self._stages[stage_name] = stage

    def remove(self, stage_name: str):
        if stage_name not in self._stages:
            raise ValueError(f"Stage {stage_name} does not exist.")
        del self._stages[stage_name]
        self._outputs.pop(stage_name, None)

    def get(self, stage_name: str) -> Callable[[Any], Any]:
        if stage_name not in self._stages:
            raise ValueError(f"Stage {stage_name} does not exist.")
        return self._stages[stage_name]

    def get_output(self, stage_name: str):
        """
        Get the output of a stage.

        Raises:
            ValueError: If the stage does not exist or has not run yet.
        """
        if stage_name not in self._stages:
            raise ValueError(f"Stage {stage_name} does not exist.")
        if stage_name not in self._outputs:
            raise ValueError(f"Stage {stage_name} does not have any output yet, start by running the pipeline.")
        return self._outputs[stage_name]

    def clear(self):
        self._stages = OrderedDict()
        self._outputs = OrderedDict()

    def forward(self, inputs):
        """
        Run every stage in insertion order.

        Returns:
            The output of the last stage.
        """
        current = inputs
        for stage_name, stage in self._stages.items():
            if self.verbose:
                print(f"{STAGE_COLOR}[{stage_name}]{Style.RESET_ALL}")
            current = stage(current)
            self._outputs[stage_name] = current
        return current

    def __call__(self, inputs):
        return self.forward(inputs)
