"""Exception hierarchy shared by all modules."""


class IsolabError(Exception):
    """Base class for library errors."""


class EncodingError(IsolabError, ValueError):
    """A vertex encoding is malformed for its graph family."""


class ResourceError(IsolabError, RuntimeError):
    """An enumeration or matrix exceeded its configured budget."""


class UnsupportedFamilyError(IsolabError, TypeError):
    """The operation is not defined for this graph family."""


class DegenerateInputError(IsolabError, ValueError):
    """Input is valid but the requested quantity is undefined."""


class CapacityError(IsolabError, ValueError):
    """Not enough room in a finite graph to complete the request."""


class InfeasibleError(IsolabError, ValueError):
    """A linear system or program has no solution."""


class IdentityViolation(IsolabError, AssertionError):
    """An exact identity failed; carries the offending instance."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
