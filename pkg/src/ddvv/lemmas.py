"""Checkable versions of the spectral and commutator-norm bounds behind the inequality.

* :func:`spectrum_profile` -- pairs of eigenvalues more than 1 apart always
  share the first row or the last column.
* :func:`lemma22_sum` -- ``sum_{(i,j) in I} ((l_i - l_j)^2 - 1) <= 1``.
* :func:`lemma23_sum` -- ``sum_{b in J} (||[Q^_a, Q^_b]||^2 - 1) <= 1``.
* :func:`lemma24_sum` -- ``sum_b ||[Q^_a, Q^_b]||^2 = n - (Tr Q^_a)^2 <= n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import IndexScheme, basis_matrices, random_orthogonal
from .errors import InputError, InternalInconsistencyError


@dataclass(frozen=True)
class SpectrumProfile:
    lam: np.ndarray
    I1: tuple
    I2: tuple
    I: tuple
    branch: str

    @property
    def n(self):
        return len(self.lam)

    @property
    def n0(self):
        return len(self.I)


def spectrum_profile(lam, tol=1e-10):
    """Index sets of eigenvalue pairs more than 1 apart, for a unit spectrum.

    ``lam`` is sorted into descending order. Raises
    :class:`InternalInconsistencyError` if ``I`` is neither ``{0} x I1`` nor
    ``I2 x {n-1}`` (0-based).
    """
    lam = np.sort(np.asarray(lam, dtype=float))[::-1]
    if lam.ndim != 1 or len(lam) < 1:
        raise InputError("spectrum must be a non-empty vector")
    if abs(float(lam @ lam) - 1.0) > tol:
        raise InputError(f"spectrum must have unit 2-norm, got {float(lam @ lam)!r}")
    n = len(lam)
    I1 = tuple(j for j in range(n) if lam[0] - lam[j] > 1)
    I2 = tuple(i for i in range(n) if lam[i] - lam[n - 1] > 1)
    I = tuple((i, j) for i in range(n) for j in range(i + 1, n) if lam[i] - lam[j] > 1)
    first_row = set(I) == {(0, j) for j in I1}
    last_col = set(I) == {(i, n - 1) for i in I2}
    if first_row and last_col:
        branch = "both"
    elif first_row:
        branch = "first-row"
    elif last_col:
        branch = "last-column"
    else:
        raise InternalInconsistencyError(f"index set {I} has neither row nor column form")
    return SpectrumProfile(lam, I1, I2, I, branch)


def lemma22_sum(profile):
    lam = profile.lam
    return float(sum((lam[i] - lam[j]) ** 2 - 1.0 for i, j in profile.I))


def lemma22_equality_witness(n, n0):
    """Unit spectrum attaining ``lemma22_sum == 1`` with ``|I| = n0`` (first-row branch)."""
    if not 1 <= n0 < n:
        raise InputError(f"need 1 <= n0 < n, got n={n}, n0={n0}")
    lam = np.zeros(n)
    lam[0] = math.sqrt(n0 / (n0 + 1))
    lam[n - n0:] = -1.0 / math.sqrt(n0 * n0 + n0)
    return lam


def mirror_spectrum(lam):
    """``-reverse(lam)``; swaps the first-row and last-column branches."""
    return -np.asarray(lam, dtype=float)[::-1]


def _norm_row(scheme, q, alpha):
    mats = basis_matrices(scheme, q)
    return kernels.commutator_norms(mats)[alpha], mats


def _check_q(scheme, q):
    q = np.asarray(q, dtype=float)
    if q.shape != (scheme.N, scheme.N):
        raise InputError(f"Q must be {scheme.N} x {scheme.N}")
    if np.max(np.abs(q.T @ q - np.eye(scheme.N))) > 1e-9:
        raise InputError("Q must be orthogonal")
    return q


def greedy_subset(scheme, q, alpha):
    """``{b : ||[Q^_alpha, Q^_b]||^2 > 1}``, the subset maximizing :func:`lemma23_sum`."""
    q = _check_q(scheme, q)
    row, _ = _norm_row(scheme, q, alpha)
    return tuple(int(b) for b in np.flatnonzero(row > 1.0))


def lemma23_sum(scheme, q, alpha, subset):
    """``sum_{b in subset} (||[Q^_alpha, Q^_b]||^2 - 1)``."""
    q = _check_q(scheme, q)
    subset = tuple(int(b) for b in subset)
    if any(not 0 <= b < scheme.N for b in subset):
        raise InputError(f"subset indices must lie in 0..{scheme.N - 1}")
    row, _ = _norm_row(scheme, q, alpha)
    return float(sum(row[b] - 1.0 for b in subset))


def lemma23_chain(scheme, q, alpha, subset):
    """The bound chain for :func:`lemma23_sum` evaluated in the eigenbasis of ``Q^_alpha``.

    Returns ``(direct, eigenbasis, lemma22)``, where ``eigenbasis`` is the same
    sum expanded as ``sum_b sum_(i,j) ((l_i - l_j)^2 - 1) q'_(ij),b^2`` and
    ``lemma22`` the spectral bound; ``direct == eigenbasis <= lemma22 <= 1``.
    """
    q = _check_q(scheme, q)
    subset = tuple(int(b) for b in subset)
    row, mats = _norm_row(scheme, q, alpha)
    direct = float(sum(row[b] - 1.0 for b in subset))
    lam, vecs = np.linalg.eigh(mats[alpha])
    lam, vecs = lam[::-1], vecs[:, ::-1]
    i, j = scheme.pairs[:, 0], scheme.pairs[:, 1]
    weights = (lam[i] - lam[j]) ** 2 - 1.0
    eig = 0.0
    for b in subset:
        rotated = vecs.T @ mats[b] @ vecs
        coords = rotated[i, j] * scheme.coord_scale
        eig += float(weights @ coords ** 2)
    bound = lemma22_sum(spectrum_profile(lam, tol=1e-8))
    return direct, eig, bound


def lemma24_sum(scheme, q, alpha, tol=1e-10):
    """``sum_b ||[Q^_alpha, Q^_b]||^2``, checked against ``n - (Tr Q^_alpha)^2``."""
    q = _check_q(scheme, q)
    row, mats = _norm_row(scheme, q, alpha)
    value = float(row.sum())
    closed = scheme.n - float(np.trace(mats[alpha])) ** 2
    if abs(value - closed) > tol * max(1.0, scheme.n):
        raise InternalInconsistencyError(f"row sum {value} != n - tr^2 = {closed}")
    return value


def random_unit_spectrum(n, rng):
    """Unit vector with a random number of nonzero entries, so that all ``|I|`` occur."""
    k = int(rng.integers(1, n + 1))
    lam = np.zeros(n)
    lam[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
    norm = np.linalg.norm(lam)
    if norm == 0.0:
        lam[0], norm = 1.0, 1.0
    return lam / norm


def lemma_suite(seed=0, spectra=10_000, orthogonal=1_000, max_n_spectrum=10, max_n_orth=5):
    """Monte Carlo sweep over all four bounds; returns the worst observed values.

    Each entry pairs the worst observation with the bound it must respect.
    """
    rng = np.random.default_rng(seed)
    worst22 = -math.inf
    branches = {"first-row": 0, "last-column": 0, "both": 0}
    for _ in range(spectra):
        n = int(rng.integers(1, max_n_spectrum + 1))
        prof = spectrum_profile(random_unit_spectrum(n, rng))
        branches[prof.branch] += 1
        worst22 = max(worst22, lemma22_sum(prof))

    witness_err = 0.0
    for n in range(2, max_n_spectrum + 1):
        for n0 in range(1, n):
            lam = lemma22_equality_witness(n, n0)
            witness_err = max(witness_err, abs(lemma22_sum(spectrum_profile(lam)) - 1.0))
            mirrored = spectrum_profile(mirror_spectrum(lam))
            witness_err = max(witness_err, abs(lemma22_sum(mirrored) - 1.0))

    worst23 = -math.inf
    worst24_excess = -math.inf
    worst24_closed = 0.0
    for n in range(1, max_n_orth + 1):
        scheme = IndexScheme.of(n)
        for _ in range(orthogonal):
            q = random_orthogonal(scheme.N, rng)
            mats = basis_matrices(scheme, q)
            norms = kernels.commutator_norms(mats)
            traces = np.trace(mats, axis1=1, axis2=2)
            sums = norms.sum(axis=1)
            worst24_closed = max(worst24_closed, float(np.max(np.abs(sums - (n - traces ** 2)))))
            worst24_excess = max(worst24_excess, float(np.max(sums)) - n)
            greedy = np.where(norms > 1.0, norms - 1.0, 0.0).sum(axis=1)
            worst23 = max(worst23, float(np.max(greedy)))
    return {
        "lemma21_branches": branches,
        "lemma22_max": (worst22, 1.0),
        "lemma22_witness_error": (witness_err, 1e-12),
        "lemma23_max": (worst23, 1.0),
        "lemma24_closed_form_error": (worst24_closed, 1e-10),
        "lemma24_max_minus_n": (worst24_excess, 0.0),
    }
