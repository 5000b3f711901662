"""Pointwise curvature of a submanifold from its shape operators.

At a point of ``M^n`` in a space form of curvature ``c`` with normal frame
``xi_1..xi_m`` and shape operators ``A_r = A_{xi_r}`` (symmetric ``n x n``)::

    R(e_i, e_j, e_j, e_i) = c + sum_r (A_r)_ii (A_r)_jj - (A_r)_ij^2     (Gauss)
    <R^perp(e_i, e_j) xi_r, xi_s> = ([A_r, A_s])_ij                     (Ricci)

and ``rho``, ``rho_perp`` are the normalized sums of these over ``i < j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import SymFamily, symmetrize
from .core import EQUALITY_TOL, detect_equality, normal_form_pair, residual_limit
from .errors import InputError, InternalInconsistencyError

UMBILIC_RTOL = 1e-12


@dataclass(frozen=True)
class CurvaturePoint:
    shape_ops: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        ops = np.asarray(self.shape_ops, dtype=float)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] < 1:
            raise InputError(f"expected a stack of shape operators, got shape {ops.shape}")
        if ops.shape[1] < 2:
            raise InputError("tangent dimension must be >= 2")
        ops, _ = symmetrize(ops)
        ops.setflags(write=False)
        object.__setattr__(self, "shape_ops", ops)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self):
        return self.shape_ops.shape[1]

    @property
    def m(self):
        return self.shape_ops.shape[0]

    def mean_curvature(self):
        """Components of ``H`` in the normal frame."""
        return np.trace(self.shape_ops, axis1=1, axis2=2) / self.n


@dataclass(frozen=True)
class CurvatureReport:
    rho: float
    rho_perp: float
    H_sq: float
    c: float
    geometric_gap: float
    wintgen_flag: bool

    def as_dict(self):
        return {"rho": self.rho, "rho_perp": self.rho_perp, "H_sq": self.H_sq, "c": self.c,
                "gap": self.geometric_gap, "wintgen": self.wintgen_flag}


def sectional_terms(point):
    """``R(e_i, e_j, e_j, e_i)`` for all ``i, j`` via the Gauss equation."""
    a = point.shape_ops
    diag = np.diagonal(a, axis1=1, axis2=2)
    gauss = np.einsum("ri,rj->ij", diag, diag) - np.einsum("rij,rij->ij", a, a)
    return point.c + gauss


def normal_curvature_terms(point):
    """``<R^perp(e_i, e_j) xi_r, xi_s>`` indexed ``[r, s, i, j]`` via the Ricci equation."""
    a = point.shape_ops
    prod = np.einsum("rik,skj->rsij", a, a)
    return prod - prod.transpose(1, 0, 2, 3)


def _shift_stack(point):
    h = point.mean_curvature()
    h_norm = float(np.linalg.norm(h))
    frame = normal_frame(h)
    shifted = np.einsum("sr,sij->rij", frame, point.shape_ops)
    shifted[0] -= h_norm * np.eye(point.n)
    # cancellation noise of an umbilic point is not a family
    scale = float(np.sum(point.shape_ops ** 2))
    if float(np.sum(shifted ** 2)) <= UMBILIC_RTOL ** 2 * scale:
        shifted[:] = 0.0
    return shifted, frame, h_norm


def normal_frame(h):
    """Orthogonal ``m x m`` matrix whose first column is ``h/|h|`` (identity if ``h = 0``)."""
    h = np.asarray(h, dtype=float)
    m = len(h)
    norm = float(np.linalg.norm(h))
    if norm == 0.0:
        return np.eye(m)
    u = h / norm
    e1 = np.zeros(m)
    e1[0] = 1.0
    v = e1 - u
    vv = float(v @ v)
    if vv < 1e-30:
        return np.eye(m)
    # Householder reflection swapping e1 and u
    return np.eye(m) - 2.0 * np.outer(v, v) / vv


def curvature_report(point, tol=EQUALITY_TOL):
    """``rho``, ``rho_perp``, ``|H|^2`` and the gap ``|H|^2 + c - rho - rho_perp``."""
    n = point.n
    norm_factor = 2.0 / (n * (n - 1))
    iu = np.triu_indices(n, 1)
    rho = norm_factor * float(sectional_terms(point)[iu].sum())
    normal = normal_curvature_terms(point)
    ru = np.triu_indices(point.m, 1)
    perp_sq = float(np.sum(normal[ru[0], ru[1]][:, iu[0], iu[1]] ** 2))
    rho_perp = norm_factor * math.sqrt(perp_sq)
    h = point.mean_curvature()
    h_sq = float(h @ h)
    gap = h_sq + point.c - rho - rho_perp

    shifted, _, _ = _shift_stack(point)
    total = float(np.sum(shifted * shifted))
    lhs = 4.0 * perp_sq
    flag = bool(total * total - lhs <= tol * total * total)
    return CurvatureReport(rho, rho_perp, h_sq, point.c, gap, flag)


def shift_family(point):
    """Traceless family ``(A_{u_1} - |H| I, A_{u_2}, ..., A_{u_m})`` with ``u_1 = H/|H|``."""
    shifted, _, _ = _shift_stack(point)
    return SymFamily._trusted(shifted)


@dataclass
class WintgenFrame:
    """Tangent basis ``P`` (columns) and normal-frame rotation with ``lam``, ``mu``.

    With ``A'_k = sum_s frame[s, k] A_s``, ``P^T A'_0 P = lam_0 I + mu (E_12 + E_21)``,
    ``P^T A'_1 P = lam_1 I + mu (E_11 - E_22)`` and ``P^T A'_r P = lam_r I`` for
    ``r >= 2``.
    """

    P: np.ndarray
    frame: np.ndarray
    lam: np.ndarray
    mu: float
    residual: float

    def shape_operators(self):
        """Shape operators in the original frame implied by this normal form."""
        n, m = self.P.shape[0], self.frame.shape[0]
        forms = np.array([l * np.eye(n) for l in self.lam])
        if self.mu > 0 and m >= 2:
            off, diag = normal_form_pair(n, self.mu)
            forms[0] += off
            forms[1] += diag
        forms = self.P @ forms @ self.P.T
        return np.einsum("rs,sij->rij", self.frame, forms)

    def as_dict(self):
        return {"P": self.P.tolist(), "frame": self.frame.tolist(), "lambda": self.lam.tolist(),
                "mu": self.mu, "residual": self.residual}


def wintgen_detect(point, tol=EQUALITY_TOL) -> Optional[WintgenFrame]:
    """Normal form of a Wintgen ideal point, or ``None`` if the point is not one."""
    shifted, frame, h_norm = _shift_stack(point)
    cert = detect_equality(SymFamily._trusted(shifted), tol)
    if cert is None:
        return None
    if cert.kind == "zero-family":
        total_frame, lam = np.eye(point.m), point.mean_curvature()
    else:
        total_frame = frame @ cert.R
        lam = h_norm * cert.R[0]
    out = WintgenFrame(cert.P, total_frame, lam, cert.mu, 0.0)
    ops = point.shape_ops
    recon = out.shape_operators()
    scale = math.sqrt(float(np.sum(ops * ops)))
    err = math.sqrt(float(np.sum((ops - recon) ** 2)))
    out.residual = err / scale if scale > 0 else err
    if out.residual > residual_limit(tol):
        raise InternalInconsistencyError(
            f"Wintgen point but normal form residual is {out.residual:.3e}"
        )
    return out


def wintgen_invariants(lam, mu):
    """Frame-independent data of a normal form: ``(mu, |lam_pair|, |lam_rest|)``.

    The pair slots can be rotated together with a tangent rotation, and the
    remaining slots rotated freely, without changing the form.
    """
    lam = np.asarray(lam, dtype=float)
    return float(mu), float(np.linalg.norm(lam[:2])), float(np.linalg.norm(lam[2:]))


def wintgen_point(n, lam, mu, c=0.0, tangent=None, normal=None):
    """Build a point whose shape operators are in normal form, optionally rotated."""
    lam = np.asarray(lam, dtype=float)
    m = len(lam)
    ops = np.array([l * np.eye(n) for l in lam])
    if m >= 2:
        off, diag = normal_form_pair(n, mu)
        ops[0] += off
        ops[1] += diag
    if tangent is not None:
        ops = tangent @ ops @ tangent.T
    if normal is not None:
        ops = np.einsum("rs,sij->rij", normal, ops)
    return CurvaturePoint(ops, c)


__all__ = [
    "CurvaturePoint", "CurvatureReport", "WintgenFrame", "curvature_report", "normal_frame",
    "shift_family", "wintgen_detect", "wintgen_invariants", "wintgen_point",
    "sectional_terms", "normal_curvature_terms",
]
