"""Pure-numpy versions of the commutator kernels.

Used when the compiled ``ddvv._kernels`` extension is unavailable, and as the
reference the compiled kernels are tested against.
"""
import numpy as np


def commutator_norms(stack):
    """Matrix of squared Frobenius norms ``||[A_a, A_b]||^2`` for a stack.

    Parameters
    ----------
    stack : ndarray, shape (K, n, n)

    Returns
    -------
    ndarray, shape (K, K)
    """
    stack = np.asarray(stack, dtype=float)
    prod = np.einsum("aij,bjk->abik", stack, stack)
    comm = prod - prod.transpose(1, 0, 2, 3)
    return np.einsum("abij,abij->ab", comm, comm)


def commutator_grad(stack, weights):
    """Weighted double commutators ``G_a = sum_b w_b [[A_a, A_b], A_b]``.

    For symmetric ``A_a`` this is half the gradient of
    ``sum_b w_b ||[A_a, A_b]||^2`` with respect to ``A_a``.
    """
    stack = np.asarray(stack, dtype=float)
    weights = np.asarray(weights, dtype=float)
    prod = np.einsum("aij,bjk->abik", stack, stack)
    comm = prod - prod.transpose(1, 0, 2, 3)
    right = np.einsum("abij,bjk->abik", comm, stack)
    left = np.einsum("bij,abjk->abik", stack, comm)
    return np.einsum("b,abij->aij", weights, right - left)
