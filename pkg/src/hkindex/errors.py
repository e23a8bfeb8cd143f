"""Exception types shared across the toolkit."""


class GridMismatchError(ValueError):
    """Two fields or operators live on different collocation grids."""


class NonIntegrableInputError(ValueError):
    """A mean-zero-only operator was applied to a field with nonzero mean."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its residual target."""

    def __init__(self, message, last_residual=None, iterations=None):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations


class ModelMismatchError(ValueError):
    """A wave profile with the wrong model tag was passed to an operator builder."""


class FredholmViolationError(ValueError):
    """The right-hand side of a constrained solve is not orthogonal to the kernel."""


class TheoryConsistencyError(RuntimeError):
    """The index formula and the directly computed spectrum disagree.

    This signals a numerics bug, not a property of the wave: the count
    identity holds whenever the pipeline is computing what it claims to.
    """
