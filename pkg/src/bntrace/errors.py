"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a documented precondition or file contract.

    CLI maps this to exit code 2; anything else that escapes is exit code 3.
    """


class CycleError(ValidationError):
    """Raised when a set of parent lists does not describe a DAG."""
