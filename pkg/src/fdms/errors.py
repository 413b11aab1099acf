"""Exception hierarchy shared by the solvers and the CLI."""


class FDMSError(Exception):
    pass


class DimensionError(FDMSError, ValueError):
    pass


class EvaluationError(FDMSError):
    """A callback produced a non-finite value."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class NonConvergence(FDMSError):
    def __init__(self, iterations, residual_norm, index=None):
        self.iterations = iterations
        self.residual_norm = residual_norm
        self.index = index
        where = "" if index is None else f" at step {index}"
        super().__init__(
            f"Newton did not converge{where}: {iterations} iterations, "
            f"residual {residual_norm:.3e}"
        )

    def at(self, index):
        return NonConvergence(self.iterations, self.residual_norm, index)


class SingularJacobian(FDMSError):
    def __init__(self, condition, index=None):
        self.condition = condition
        self.index = index
        where = "" if index is None else f" at step {index}"
        super().__init__(f"singular Jacobian{where} (condition estimate {condition:.3e})")

    def at(self, index):
        return SingularJacobian(self.condition, index)


class NoSection(FDMSError):
    pass


class BasePointMismatch(FDMSError):
    pass
