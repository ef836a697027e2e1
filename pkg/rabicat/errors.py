"""
Exceptions raised by RABICAT.

All derive from builtin exception types so callers may catch either the
specific class or the builtin parent.
"""


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class TruncationError(RuntimeError):
    """Probability weight leaked into the top of the truncated Fock space."""

    def __init__(self, time: float, tail_weight: float, tail_tol: float):
        self.time = time
        self.tail_weight = tail_weight
        super().__init__(
            f"Fock truncation inadequate at t={time:.6g}: tail weight "
            f"{tail_weight:.3e} exceeds tail_tol={tail_tol:.1e}; increase n_max"
        )


class KrylovConvergenceError(RuntimeError):
    """Krylov substep could not reach the requested local error."""

    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(f"Krylov step did not converge at t={time:.6g}. {message}")


class StepSizeUnderflowError(RuntimeError):
    """Adaptive master-equation step shrank below the allowed minimum."""

    def __init__(self, time: float, step: float):
        self.time = time
        self.step = step
        super().__init__(f"Step size underflow at t={time:.6g} (h={step:.3e})")


class PositivityError(RuntimeError):
    """Density matrix acquired a significantly negative eigenvalue."""

    def __init__(self, time: float, min_eigenvalue: float):
        self.time = time
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"Density matrix lost positivity at t={time:.6g}: "
            f"smallest eigenvalue {min_eigenvalue:.3e}"
        )


class RecurrenceOverflowError(OverflowError):
    """Orthogonal-function recurrence left the floating point range."""


class DomainError(ValueError):
    """Effective Hamiltonian evaluated outside its real domain."""
