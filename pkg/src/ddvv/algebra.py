"""Symmetric-matrix basis, commutators, Gram identities and the 2x2 compound map.

Index conventions
-----------------
Indices are 0-based. The index set ``S = {(i, j) : 0 <= i <= j < n}`` is
ordered lexicographically, ``(i, j) < (k, l)`` iff ``i < k`` or ``i == k and
j < l``, and identified with ``0..N-1`` where ``N = n(n+1)/2``. The lookup
tables live on :class:`IndexScheme`; every other module goes through them.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InternalInconsistencyError

SQRT2 = math.sqrt(2.0)
SYMMETRY_TOL = 1e-9


@functools.lru_cache(maxsize=None)
def strict_pairs(k):
    """Pairs ``(i, j)`` with ``0 <= i < j < k`` in lexicographic order, shape (C(k,2), 2)."""
    out = np.array(list(itertools.combinations(range(k), 2)), dtype=np.intp)
    out = out.reshape(-1, 2)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class IndexScheme:
    """Ordered index set of the upper triangle of an ``n x n`` matrix.

    Attributes
    ----------
    n : int
        Matrix dimension.
    N : int
        ``n(n+1)/2``, the dimension of the space of symmetric matrices.
    pairs : ndarray, shape (N, 2)
        ``pairs[alpha] = (i, j)`` with ``i <= j``.
    flat : ndarray, shape (n, n)
        ``flat[i, j] = flat[j, i] = alpha``.
    diagonal : ndarray of bool, shape (N,)
        ``diagonal[alpha]`` is true iff ``alpha = (i, i)``.
    """

    n: int
    N: int = field(init=False)
    pairs: np.ndarray = field(init=False, repr=False, compare=False)
    flat: np.ndarray = field(init=False, repr=False, compare=False)
    diagonal: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise InputError(f"matrix dimension must be >= 1, got {n}")
        pairs = np.array([(i, j) for i in range(n) for j in range(i, n)], dtype=np.intp)
        flat = np.empty((n, n), dtype=np.intp)
        for alpha, (i, j) in enumerate(pairs):
            flat[i, j] = flat[j, i] = alpha
        diagonal = pairs[:, 0] == pairs[:, 1]
        for arr in (pairs, flat, diagonal):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "N", n * (n + 1) // 2)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "flat", flat)
        object.__setattr__(self, "diagonal", diagonal)

    @classmethod
    @functools.lru_cache(maxsize=None)
    def of(cls, n):
        """Cached scheme for dimension ``n``."""
        return cls(n)

    def index(self, i, j):
        """Flat position of ``(i, j)`` (order of ``i, j`` irrelevant)."""
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InputError(f"index ({i}, {j}) out of range for n={self.n}")
        return int(self.flat[i, j])

    def pair(self, alpha):
        if not 0 <= alpha < self.N:
            raise InputError(f"flat index {alpha} out of range for N={self.N}")
        i, j = self.pairs[alpha]
        return int(i), int(j)

    def _resolve(self, alpha):
        if isinstance(alpha, (tuple, list, np.ndarray)):
            i, j = (int(v) for v in alpha)
            if not (0 <= i <= j < self.n):
                raise InputError(f"index ({i}, {j}) not in S for n={self.n}")
            return i, j
        return self.pair(int(alpha))

    @property
    def coord_scale(self):
        """Coordinate of ``E_ij + E_ji``-type entries: 1 on the diagonal, sqrt(2) off it."""
        return np.where(self.diagonal, 1.0, SQRT2)


def symmetrize(a, tol=SYMMETRY_TOL):
    """Return ``((a + a^T)/2, defect)``; raise :class:`InputError` if the defect exceeds ``tol``.

    The defect is ``max |a - a^T|`` scaled by ``max(1, max |a|)``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InputError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix entries must be finite")
    at = np.swapaxes(a, -1, -2)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    defect = float(np.max(np.abs(a - at))) / scale if a.size else 0.0
    if defect > tol:
        raise InputError(f"matrix is not symmetric (defect {defect:.3e} > {tol:.1e})")
    return 0.5 * (a + at), defect


class SymFamily:
    """An ordered family ``(B_1, ..., B_m)`` of real symmetric ``n x n`` matrices.

    Members are symmetrized at construction; an asymmetry defect above
    ``tol`` is rejected rather than repaired.
    """

    def __init__(self, matrices, tol=SYMMETRY_TOL):
        try:
            arr = np.asarray(matrices, dtype=float)
        except ValueError as exc:
            raise InputError(f"matrices do not form a regular stack: {exc}") from exc
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] < 1:
            raise InputError(f"expected a non-empty stack of square matrices, got shape {arr.shape}")
        arr, defect = symmetrize(arr, tol)
        arr.setflags(write=False)
        self.members = arr
        self.defect = defect

    @classmethod
    def _trusted(cls, arr):
        # internal constructor for arrays already known to be exactly symmetric
        obj = cls.__new__(cls)
        arr = np.array(arr, dtype=float)
        arr.setflags(write=False)
        obj.members = arr
        obj.defect = 0.0
        return obj

    @property
    def m(self):
        return self.members.shape[0]

    @property
    def n(self):
        return self.members.shape[1]

    @property
    def scheme(self):
        return IndexScheme.of(self.n)

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, r):
        return self.members[r]

    def __repr__(self):
        return f"SymFamily(m={self.m}, n={self.n})"


def build_basis(scheme):
    """Orthonormal basis ``E^_alpha`` of symmetric matrices, shape (N, n, n).

    ``E^_(i,i) = E_ii`` and ``E^_(i,j) = (E_ij + E_ji)/sqrt(2)`` for ``i < j``.
    """
    return _basis(scheme.n)


@functools.lru_cache(maxsize=None)
def _basis(n):
    scheme = IndexScheme.of(n)
    out = np.zeros((scheme.N, n, n))
    for alpha, (i, j) in enumerate(scheme.pairs):
        if i == j:
            out[alpha, i, i] = 1.0
        else:
            out[alpha, i, j] = out[alpha, j, i] = 1.0 / SQRT2
    out.setflags(write=False)
    return out


def commutator(a, b):
    """``ab - ba``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def frob_sq(a):
    """Sum of squared entries."""
    a = np.asarray(a, dtype=float)
    return float(np.sum(a * a))


def _gram_closed_form(i, j, k, l):
    if (i, j) > (k, l):
        i, j, k, l = k, l, i, j
    if (i == j == k < l) or (i < j == k == l):
        return 1.0
    if (i < j == k < l) or (i == k < j < l) or (i < k < j == l):
        return 0.5
    return 0.0


def gram_entry_basis(scheme, alpha, beta):
    """``||[E^_alpha, E^_beta]||^2`` from the closed-form case analysis.

    ``alpha`` and ``beta`` are flat indices or ``(i, j)`` pairs. The closed
    form is cross-checked against the direct commutator norm.
    """
    i, j = scheme._resolve(alpha)
    k, l = scheme._resolve(beta)
    value = _gram_closed_form(i, j, k, l)
    basis = build_basis(scheme)
    direct = frob_sq(commutator(basis[scheme.flat[i, j]], basis[scheme.flat[k, l]]))
    if abs(direct - value) > 1e-12:
        raise InternalInconsistencyError(
            f"closed form {value} disagrees with direct value {direct} at {(i, j)}, {(k, l)}"
        )
    return value


def gram_row_identity(scheme, alpha, beta):
    """``sum_gamma <[E^_alpha, E^_gamma], [E^_beta, E^_gamma]>`` computed numerically.

    Checked against ``n * delta_{alpha beta} - delta_alpha * delta_beta``.
    """
    a = scheme.index(*scheme._resolve(alpha))
    b = scheme.index(*scheme._resolve(beta))
    basis = build_basis(scheme)
    ea, eb = basis[a], basis[b]
    ca = np.einsum("ij,gjk->gik", ea, basis) - np.einsum("gij,jk->gik", basis, ea)
    cb = np.einsum("ij,gjk->gik", eb, basis) - np.einsum("gij,jk->gik", basis, eb)
    value = float(np.sum(ca * cb))
    expected = scheme.n * float(a == b) - float(scheme.diagonal[a] and scheme.diagonal[b])
    if abs(value - expected) > 1e-12:
        raise InternalInconsistencyError(
            f"Gram row identity fails at ({a}, {b}): {value} != {expected}"
        )
    return value


def compound(a):
    """Second compound matrix: all 2x2 minors of ``a``.

    ``phi(a)[(i,j),(k,l)] = a_ik a_jl - a_il a_jk`` for ``i < j`` and ``k < l``,
    rows and columns in lexicographic pair order.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 2 or a.shape[1] < 2:
        raise InputError(f"compound needs a matrix with both dimensions >= 2, got {a.shape}")
    rows = strict_pairs(a.shape[0])
    cols = strict_pairs(a.shape[1])
    ri, rj = rows[:, 0], rows[:, 1]
    ck, cl = cols[:, 0], cols[:, 1]
    return (a[np.ix_(ri, ck)] * a[np.ix_(rj, cl)]
            - a[np.ix_(ri, cl)] * a[np.ix_(rj, ck)])


def family_coefficients(family):
    """Coefficient matrix ``B`` (N x m) with ``B_r = sum_alpha B[alpha, r] E^_alpha``."""
    if not isinstance(family, SymFamily):
        family = SymFamily(family)
    scheme = family.scheme
    i, j = scheme.pairs[:, 0], scheme.pairs[:, 1]
    return family.members[:, i, j].T * scheme.coord_scale[:, None]


def coefficients_to_matrices(scheme, coeffs):
    """Inverse of :func:`family_coefficients`: columns of ``coeffs`` to a (m, n, n) stack."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    if coeffs.shape[0] != scheme.N:
        raise InputError(f"expected {scheme.N} coefficient rows, got {coeffs.shape[0]}")
    return np.einsum("ar,aij->rij", coeffs, build_basis(scheme))


def basis_matrices(scheme, q):
    """The symmetric matrices ``Q^_alpha = sum_beta q[beta, alpha] E^_beta``, shape (N, n, n)."""
    return coefficients_to_matrices(scheme, q)


def random_orthogonal(k, rng, special=False):
    """Haar-distributed ``k x k`` orthogonal matrix (in SO(k) if ``special``)."""
    z = rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diag(r))
    if special and np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def is_orthogonal(q, tol=1e-10):
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        return False
    return float(np.max(np.abs(q.T @ q - np.eye(q.shape[0])))) <= tol
