"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class XtalError(Exception):
    """Base error for the package."""

    exit_code: int = 1


class InputError(XtalError, ValueError):
    """Malformed input, failed precondition or usage error."""

    exit_code = 2


class NumericalError(XtalError, ArithmeticError):
    """Degenerate configuration, solver failure or violated invariant."""

    exit_code = 3


class BudgetError(NumericalError):
    """A lattice enumeration would exceed the configured point budget."""
