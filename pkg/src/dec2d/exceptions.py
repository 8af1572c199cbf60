"""Exception hierarchy for dec2d."""


class Dec2dError(Exception):
    """Base class for all errors raised by dec2d."""


class MeshError(Dec2dError, ValueError):
    """A mesh failed validation (bad indices, degenerate or non-manifold)."""


class MeshFormatError(MeshError):
    """A .node/.ele text could not be parsed.

    ``line`` and ``column`` are 1-based; ``source`` names the file or stream.
    """

    def __init__(self, message, *, source="<text>", line=None, column=None):
        self.source = source
        self.line = line
        self.column = column
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class DegenerateGeometryError(MeshError):
    """Collinear triangle or zero-area dual cell."""


class ProblemError(Dec2dError, ValueError):
    """Invalid Poisson problem data (constraints, coefficients, config)."""


class SolverError(Dec2dError, RuntimeError):
    """Base class for linear solver failures.

    Carries the iteration count and the last relative residual.
    """

    def __init__(self, message, *, iterations=0, residual=float("nan")):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")


class CGBreakdownError(SolverError):
    """p^T A p <= 0 encountered: the system is not positive definite."""


class ConvergenceError(SolverError):
    """Conjugate gradient did not reach the tolerance within max_iter."""
