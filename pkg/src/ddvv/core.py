"""The commutator inequality: gap evaluation, spectral reduction and equality certificates.

For real symmetric ``B_1, ..., B_m``::

    sum_{r,s} ||[B_r, B_s]||^2  <=  (sum_r ||B_r||^2)^2

with the left side summed over *ordered* pairs. Equality holds iff, after an
orthogonal rotation of the family, all members vanish except
``mu P (E_12 + E_21) P^T`` and ``mu P (E_11 - E_22) P^T``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .algebra import (
    IndexScheme,
    SymFamily,
    basis_matrices,
    build_basis,
    compound,
    family_coefficients,
    frob_sq,
    is_orthogonal,
    strict_pairs,
)
from .errors import InputError, InternalInconsistencyError

EQUALITY_TOL = 1e-9
NONNEGATIVITY_TOL = 1e-9


@dataclass(frozen=True)
class GapReport:
    lhs: float
    rhs: float
    gap: float
    equality_flag: bool

    def as_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
                "equality": self.equality_flag}


def _as_family(family):
    return family if isinstance(family, SymFamily) else SymFamily(family)


def _gap_from_stack(stack, tol):
    norms = kernels.commutator_norms(stack)
    lhs = float(norms.sum())
    rhs = float(np.sum(stack * stack)) ** 2
    gap = rhs - lhs
    return GapReport(lhs, rhs, gap, bool(abs(gap) <= tol * rhs))


def ddvv_gap(family, tol=EQUALITY_TOL):
    """Evaluate both sides of the inequality for a symmetric family.

    Raises
    ------
    InputError
        If a member is not symmetric.
    InternalInconsistencyError
        If the gap is below ``-1e-9 * max(1, rhs)``, which cannot happen in
        exact arithmetic.
    """
    family = _as_family(family)
    report = _gap_from_stack(family.members, tol)
    if report.gap < -NONNEGATIVITY_TOL * max(1.0, report.rhs):
        raise InternalInconsistencyError(
            f"symmetric family with negative gap {report.gap!r} (rhs {report.rhs!r})"
        )
    return report


def mixed_gap(matrices, tol=EQUALITY_TOL):
    """Same arithmetic as :func:`ddvv_gap` for arbitrary square matrices; the gap may be negative."""
    try:
        stack = np.asarray(matrices, dtype=float)
    except ValueError as exc:
        raise InputError(f"matrices do not form a regular stack: {exc}") from exc
    if stack.ndim == 2:
        stack = stack[None]
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2] or stack.shape[0] < 1:
        raise InputError(f"expected a stack of equal square matrices, got shape {stack.shape}")
    return _gap_from_stack(stack, tol)


@dataclass(frozen=True)
class ReducedForm:
    """Weights ``x`` (descending, nonnegative) and ``Q`` in SO(N) with ``B B^T = Q diag(x) Q^T``."""

    x: np.ndarray
    Q: np.ndarray
    coeffs: np.ndarray = field(repr=False)

    @property
    def scheme(self):
        N = self.Q.shape[0]
        n = int(round((math.sqrt(8 * N + 1) - 1) / 2))
        return IndexScheme.of(n)

    def basis(self):
        """The matrices ``Q^_alpha``, shape (N, n, n)."""
        return basis_matrices(self.scheme, self.Q)


def reduce(family):
    """Spectral reduction of a symmetric family to ``(x, Q)``."""
    family = _as_family(family)
    b = family_coefficients(family)
    w, v = np.linalg.eigh(b @ b.T)
    order = np.argsort(-w, kind="stable")
    x = np.clip(w[order], 0.0, None)
    q = v[:, order]
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return ReducedForm(x, q, b)


def basis_commutator_norms(scheme, q):
    """``K[alpha, beta] = ||[Q^_alpha, Q^_beta]||^2`` for the basis encoded by ``q``."""
    return kernels.commutator_norms(basis_matrices(scheme, q))


def objective(scheme, q, x):
    """``f_Q(x) = sum x_a x_b ||[Q^_a, Q^_b]||^2 - (sum x_a)^2``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (scheme.N,):
        raise InputError(f"x must have length {scheme.N}, got shape {x.shape}")
    if np.any(x < 0):
        raise InputError("objective weights must be nonnegative")
    k = basis_commutator_norms(scheme, q)
    return float(x @ k @ x - x.sum() ** 2)


def commutator_gram(stack):
    """Gram matrix of the commutators ``[A_r, A_s]``, ``r < s``, in lexicographic pair order."""
    stack = np.asarray(stack, dtype=float)
    pairs = strict_pairs(stack.shape[0])
    if len(pairs) == 0:
        return np.zeros((0, 0))
    a, b = stack[pairs[:, 0]], stack[pairs[:, 1]]
    comms = (a @ b - b @ a).reshape(len(pairs), -1)
    return comms @ comms.T


@functools.lru_cache(maxsize=None)
def basis_commutator_gram(n):
    """``C(E)`` for the standard basis of symmetric ``n x n`` matrices."""
    out = commutator_gram(build_basis(IndexScheme.of(n)))
    out.setflags(write=False)
    return out


def compound_commutator_gram(family):
    """``C(B)`` assembled as ``phi(B^T) C(E) phi(B)``."""
    family = _as_family(family)
    b = family_coefficients(family)
    if family.m < 2 or b.shape[0] < 2:
        return np.zeros((0, 0))
    return compound(b.T) @ basis_commutator_gram(family.n) @ compound(b)


class Identity31(NamedTuple):
    direct: float
    compound: float
    reduced: float


def identity_31_check(family, rtol=1e-9):
    """Left side of the inequality computed three independent ways.

    ``direct`` sums commutator norms, ``compound`` is ``2 Tr C(B)`` through
    the compound map, ``reduced`` is ``sum x_a x_b ||[Q^_a, Q^_b]||^2``.
    """
    family = _as_family(family)
    direct = float(kernels.commutator_norms(family.members).sum())
    cb = compound_commutator_gram(family)
    via_compound = 2.0 * float(np.trace(cb)) if cb.size else 0.0
    red = reduce(family)
    k = basis_commutator_norms(red.scheme, red.Q)
    reduced = float(red.x @ k @ red.x)
    values = (direct, via_compound, reduced)
    spread = max(values) - min(values)
    total = float(red.x.sum())
    if spread > rtol * max(values) + 1e-13 * total * total:
        raise InternalInconsistencyError(f"identity (direct, compound, reduced) disagree: {values}")
    return Identity31(*values)


def rotate_family(family, rotation, tol=1e-10):
    """Apply ``R`` to the family: member ``r`` becomes ``sum_s R[s, r] B_s``."""
    family = _as_family(family)
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (family.m, family.m) or not is_orthogonal(rotation, tol):
        raise InputError("rotation must be an orthogonal m x m matrix")
    return SymFamily._trusted(np.einsum("sr,sij->rij", rotation, family.members))


def conjugate_family(family, p, tol=1e-10):
    """Simultaneous conjugation ``B_r -> P B_r P^T``."""
    family = _as_family(family)
    p = np.asarray(p, dtype=float)
    if p.shape != (family.n, family.n) or not is_orthogonal(p, tol):
        raise InputError("conjugation must be an orthogonal n x n matrix")
    out = p @ family.members @ p.T
    return SymFamily._trusted(0.5 * (out + np.swapaxes(out, 1, 2)))


def normal_form_pair(n, mu=1.0):
    """``(mu (E_12 + E_21), mu (E_11 - E_22))`` as ``n x n`` matrices."""
    if n < 2:
        raise InputError("the equality pair needs n >= 2")
    off = np.zeros((n, n))
    off[0, 1] = off[1, 0] = mu
    diag = np.zeros((n, n))
    diag[0, 0], diag[1, 1] = mu, -mu
    return off, diag


@dataclass
class EqualityCertificate:
    """Witness that a family is an equality configuration.

    ``rotate_family(family, R)`` conjugated by ``P^T`` is
    ``(mu (E_12 + E_21), mu (E_11 - E_22), 0, ..., 0)`` up to ``residual``
    (relative Frobenius error of the whole family).
    """

    kind: str
    R: np.ndarray
    P: np.ndarray
    mu: float
    pair_indices: tuple
    residual: float
    diagnostics: dict = field(default_factory=dict)

    def normal_form(self):
        """The target family in the rotated frame, shape (m, n, n)."""
        m, n = self.R.shape[0], self.P.shape[0]
        out = np.zeros((m, n, n))
        if self.kind == "wintgen-pair":
            off, diag = normal_form_pair(n, self.mu)
            out[self.pair_indices[0]] = self.P @ off @ self.P.T
            out[self.pair_indices[1]] = self.P @ diag @ self.P.T
        return out

    def reconstruct(self):
        """The family implied by the certificate, in the caller's original frame."""
        return np.einsum("rs,sij->rij", self.R, self.normal_form())

    def as_dict(self):
        return {
            "kind": self.kind,
            "mu": self.mu,
            "R": self.R.tolist(),
            "P": self.P.tolist(),
            "pair_indices": list(self.pair_indices),
            "residual": self.residual,
        }


def _residual(members, recon):
    scale = math.sqrt(float(np.sum(members * members)))
    if scale == 0.0:
        return math.sqrt(float(np.sum(recon * recon)))
    return math.sqrt(float(np.sum((members - recon) ** 2))) / scale


def residual_limit(tol):
    """Largest reconstruction residual accepted for a family whose relative gap is ``<= tol``.

    The gap grows quadratically away from the equality set, so a relative gap
    of ``tol`` allows a relative distance of order ``sqrt(tol)``.
    """
    return max(10.0 * tol, 10.0 * math.sqrt(tol))


def detect_equality(family, tol=EQUALITY_TOL):
    """Certificate for an equality configuration, or ``None`` if the gap exceeds ``tol * rhs``.

    Raises
    ------
    InternalInconsistencyError
        If the gap test passes but the normal form cannot be reconstructed.
    """
    family = _as_family(family)
    report = ddvv_gap(family, tol)
    if not report.equality_flag:
        return None
    m, n = family.m, family.n
    total = float(np.sum(family.members ** 2))
    if total == 0.0:
        return EqualityCertificate("zero-family", np.eye(m), np.eye(n), 0.0, (), 0.0,
                                   {"gap": report.gap})
    if m < 2 or n < 2:
        raise InternalInconsistencyError("nonzero equality family needs m >= 2 and n >= 2")

    scheme = family.scheme
    b = family_coefficients(family)
    u, s, vt = np.linalg.svd(b, full_matrices=True)
    x = np.zeros(scheme.N)
    x[: len(s)] = s * s
    mu = math.sqrt((x[0] + x[1]) / 4.0)
    qa, qb = basis_matrices(scheme, u[:, :2])

    # P: eigenbasis of the diagonalizable member, +1/sqrt2 eigenvector first
    w, vecs = np.linalg.eigh(qa)
    p = np.column_stack([vecs[:, -1], vecs[:, 0], vecs[:, 1:-1]])
    if (p.T @ qb @ p)[0, 1] < 0:
        p[:, 1] = -p[:, 1]

    v = vt.T
    rot = np.column_stack([v[:, 1], v[:, 0], v[:, 2:]])

    sv_a = np.linalg.svd(qa, compute_uv=False)
    sv_b = np.linalg.svd(qb, compute_uv=False)
    diagnostics = {
        "gap": report.gap,
        "x": x[: min(len(x), 4)].tolist(),
        "weight_mismatch": abs(x[0] - x[1]) / x[0],
        "tail_weight": float(x[2:].sum()) / total,
        "trace": [float(np.trace(qa)), float(np.trace(qb))],
        "anticommutator": math.sqrt(frob_sq(qa @ qb + qb @ qa)),
        "third_singular_value": [float(sv_a[2]) if n > 2 else 0.0,
                                 float(sv_b[2]) if n > 2 else 0.0],
        "eigenvalues": [float(w[-1]), float(w[0])],
    }
    cert = EqualityCertificate("wintgen-pair", rot, p, mu, (0, 1), 0.0, diagnostics)
    cert.residual = _residual(family.members, cert.reconstruct())
    if cert.residual > residual_limit(tol):
        raise InternalInconsistencyError(
            f"gap within tolerance but normal form residual is {cert.residual:.3e}"
        )
    return cert
