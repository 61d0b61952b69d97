from ..settings import EXIT_NUMERIC, EXIT_USAGE


# --- Base Error ---
class LabError(Exception):
    """
    Base error for every failure the workbench reports.

    Mirrors an HTTP error: an exit code the CLI returns and a human readable detail.

    Args:
        detail: Message shown to the user.
        exit_code: Process exit code used by the command line front-end.
    """

    exit_code = EXIT_NUMERIC

    def __init__(self, detail, exit_code=None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self):
        return self.detail


# --- Numeric Failures ---
class ContractViolation(LabError):
    """Input broke a precondition (shape, symmetry, normalization, finiteness)."""


class NotPSDError(ContractViolation):
    """A matrix expected to be positive semidefinite has a clearly negative eigenvalue."""

    def __init__(self, min_eigenvalue):
        super().__init__(f"Matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")
        self.min_eigenvalue = min_eigenvalue


class ConvergenceError(LabError):
    """Iterative solver failed to reach its tolerance."""

    def __init__(self, best_residual, iteration=None, detail=None):
        where = f" at DMRG iteration {iteration}" if iteration is not None else ""
        super().__init__(detail or f"Lanczos did not converge{where}: best residual {best_residual:.3e}")
        self.best_residual = best_residual
        self.iteration = iteration


class ModelError(LabError):
    """Model data is inconsistent (bad operators, coupling matrix not positive definite)."""


# --- Usage Failures ---
class SizeGuardError(LabError):
    """Requested problem exceeds a desk-scale guard."""

    exit_code = EXIT_USAGE


class DomainError(LabError):
    """Argument outside the mathematical domain of a function."""

    exit_code = EXIT_USAGE


class UsageError(LabError):
    """Bad command-line flags."""

    exit_code = EXIT_USAGE


# --- I/O Failures ---
class OutputError(LabError):
    """Result file could not be written."""
