"""Exception hierarchy shared by every countra module."""


class CountraError(Exception):
    """Base class for all countra errors."""


class ContractError(CountraError, ValueError):
    """A caller broke a precondition (wrong vector length, bad arity, ...)."""


class InputError(CountraError, ValueError):
    """An input token is not part of the alphabet, or inputs are incompatible."""


class UnsupportedVariantError(CountraError):
    """The machine is not of the variant an operation requires."""


class MachineFormatError(CountraError):
    """A machine, grammar or weight file could not be parsed.

    ``location`` names where the problem is, e.g. ``"line 3, column 7"`` or
    ``"updates[4].mask"``.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class BudgetExceededError(CountraError):
    """An enumeration would exceed its configured budget.

    ``partial`` carries whatever was computed before the guard tripped.
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
