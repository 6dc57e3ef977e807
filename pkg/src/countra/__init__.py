"""countra: real-time counter automata as language recognizers."""

from .errors import (BudgetExceededError, ContractError, CountraError, InputError,
                     MachineFormatError, UnsupportedVariantError)
from .machine import (RESET, Add, Configuration, CounterMachine, Reset, VariantReport,
                      accepts, classify, mask_of, run_trace, step)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError", "ContractError", "CountraError", "InputError", "MachineFormatError",
    "UnsupportedVariantError", "RESET", "Add", "Configuration", "CounterMachine", "Reset",
    "VariantReport", "accepts", "classify", "mask_of", "run_trace", "step",
]
