class DDVVError(Exception):
    """Base class for errors raised by this package."""


class InputError(DDVVError, ValueError):
    """Malformed or out-of-contract input (asymmetric matrix, bad shape, ...)."""


class InternalInconsistencyError(DDVVError, RuntimeError):
    """A computed quantity contradicts an identity that holds in exact arithmetic.

    Raised e.g. when a symmetric family appears to violate the commutator
    inequality. Seeing this means a bug, not a counterexample.
    """
