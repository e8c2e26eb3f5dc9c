"""Exception hierarchy shared by every module."""


class HorizonChannelsError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HorizonChannelsError, ValueError):
    """Malformed input: bad indices, unnormalized distributions, mismatched shapes."""


class StructuralError(InputError):
    """A matrix that should be Hermitian is not."""


class PositivityError(HorizonChannelsError, ArithmeticError):
    """A density matrix has an eigenvalue below the positivity tolerance."""


class DomainError(HorizonChannelsError, ValueError):
    """A physical parameter lies outside its domain (a <= 0, R <= R_S, ...)."""


class CapacityError(HorizonChannelsError, MemoryError):
    """A requested truncation exceeds the configured dimension cap."""


class ConvergenceError(HorizonChannelsError, ArithmeticError):
    """A series did not meet its stopping rule within the allowed work."""


class TruncationError(HorizonChannelsError):
    """Fock truncation too small for the requested accuracy.

    ``suggested_dim`` carries a dimension that would satisfy the policy.
    """

    def __init__(self, message, suggested_dim=None):
        super().__init__(message)
        self.suggested_dim = suggested_dim
