"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed its own certificate.

    Raised when a computed quantity disagrees with an exact invariant it is
    required to reproduce (nullspace dimension vs. Betti number, degenerate
    intersection form on a duality-passing complex, linear solve residual
    beyond tolerance).  Distinct from ``ValueError`` so callers can map it to
    the "internal numerical failure" exit path.
    """
