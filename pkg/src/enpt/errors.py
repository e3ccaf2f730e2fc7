"""Exception types shared by the solvers."""


class EnptError(Exception):
    """Base class for solver failures."""


class SmallDenominatorError(EnptError):
    """An energy denominator fell below the degeneracy guard.

    Carries the offending state pair so the caller can see which coupling
    blew up and move those states into a model space.
    """

    def __init__(self, n, m, gap, guard):
        self.n = n
        self.m = m
        self.gap = gap
        self.guard = guard
        super().__init__(
            f"energy denominator for state pair ({n}, {m}) is {gap:.3e}, "
            f"below the guard {guard:.3e}; treat these states as quasi-degenerate"
        )


class NonConvergenceError(EnptError):
    """An iterative solve exhausted its budget without meeting tolerance."""


class QuadratureError(EnptError):
    """Panel-refined quadrature did not reach the requested accuracy."""


class EigensolverError(EnptError):
    """Jacobi diagonalization failed to converge."""

    def __init__(self, sweeps, off_norm):
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"eigensolver not converged after {sweeps} sweeps "
            f"(off-diagonal norm {off_norm:.3e})"
        )


class TargetAmbiguousError(EnptError):
    """No model-space column clearly dominates the requested target state."""
