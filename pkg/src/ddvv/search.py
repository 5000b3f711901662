"""Numerical maximization of the reduced objective over simplex x SO(N).

The objective ``f(x, Q) = sum_ab x_a x_b ||[Q^_a, Q^_b]||^2 - (sum_a x_a)^2`` is
homogeneous of degree 2 in ``x``, so it suffices to search ``x`` on the unit
simplex. Its supremum is 0, attained exactly at equality pairs.

Each restart alternates a projected-gradient step in ``x`` with a retracted
gradient step in ``Q``, both with backtracking, so ``f`` never decreases.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .algebra import IndexScheme, basis_matrices, frob_sq, random_orthogonal
from .errors import InputError, InternalInconsistencyError

ACCEPT_TOL = 1e-6
ARMIJO = 1e-4


@dataclass(frozen=True)
class SearchConfig:
    n: int
    restarts: int = 64
    max_iters: int = 500
    step_x: float = 1.0
    step_q: float = 1.0
    seed: int = 0
    tol_accept: float = ACCEPT_TOL
    stall_iters: int = 5
    workers: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise InputError("search needs n >= 2")
        if self.restarts < 1:
            raise InputError("restarts must be >= 1")
        if self.max_iters < 0:
            raise InputError("max_iters must be >= 0")


@dataclass
class RestartSummary:
    index: int
    initial_f: float
    final_f: float
    iterations: int
    accepted_x: int
    accepted_q: int
    converged: bool


@dataclass
class StationarityCertificate:
    active: list
    a: float
    b: dict
    spread: float
    normal_derivative: float
    chain_lhs: float
    chain_rhs: float
    residuals: np.ndarray = field(repr=False)

    @property
    def gamma(self):
        return len(self.active)

    def as_dict(self):
        return {
            "active": self.active,
            "gamma": self.gamma,
            "a": self.a,
            "b": {str(k): v for k, v in self.b.items()},
            "spread": self.spread,
            "normal_derivative": self.normal_derivative,
            "chain": [self.chain_lhs, self.chain_rhs],
        }


@dataclass
class SearchResult:
    config: SearchConfig
    best_f: float
    x: np.ndarray
    Q: np.ndarray
    restarts: list
    certificate: StationarityCertificate
    best_index: int

    def as_dict(self):
        return {
            "config": asdict(self.config),
            "best_f": self.best_f,
            "best_restart": self.best_index,
            "x": self.x.tolist(),
            "Q": self.Q.tolist(),
            "restarts": [asdict(r) for r in self.restarts],
            "stationarity": self.certificate.as_dict(),
        }


def project_simplex(v):
    """Euclidean projection onto ``{x >= 0, sum x = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(v) + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def norm_matrix(scheme, q):
    return kernels.commutator_norms(basis_matrices(scheme, q))


def q_gradient(scheme, q, x):
    """Riemannian gradient of ``f`` in ``Q`` as a skew ``N x N`` matrix.

    Perturbations are ``Q -> Q (I + t Omega)``; the Euclidean gradient in the
    coefficients of ``Q^_a`` is ``4 x_a sum_b x_b [[Q^_a, Q^_b], Q^_b]``.
    """
    mats = basis_matrices(scheme, q)
    grad = 4.0 * x[:, None, None] * kernels.commutator_grad(mats, x)
    i, j = scheme.pairs[:, 0], scheme.pairs[:, 1]
    euclid = (grad[:, i, j] * scheme.coord_scale).T
    a = q.T @ euclid
    return 0.5 * (a - a.T)


def retract(q, omega, t):
    """``Q (I + t Omega)`` re-orthonormalized by QR; stays in SO(N)."""
    out, r = np.linalg.qr(q @ (np.eye(q.shape[0]) + t * omega))
    return out * np.sign(np.diag(r))


def _run_restart(config, scheme, index, history=None):
    rng = np.random.default_rng([config.seed, index])
    x = rng.dirichlet(np.ones(scheme.N))
    q = random_orthogonal(scheme.N, rng, special=True)
    k = norm_matrix(scheme, q)
    f = float(x @ k @ x) - 1.0
    initial = f
    tx, tq = config.step_x, config.step_q
    acc_x = acc_q = 0
    stall = 0
    it = 0
    if history is not None:
        history.append(f)
    for it in range(1, config.max_iters + 1):
        f_start = f
        g = 2.0 * (k @ x - 1.0)
        while tx > 1e-14:
            xn = project_simplex(x + tx * g)
            fn = float(xn @ k @ xn) - 1.0
            if fn >= f + ARMIJO * float(g @ (xn - x)) and fn >= f:
                x, f = xn, fn
                acc_x += 1
                tx *= 1.5
                break
            tx *= 0.5
        omega = q_gradient(scheme, q, x)
        gn = frob_sq(omega)
        while gn > 0.0 and tq > 1e-14:
            qn = retract(q, omega, tq)
            kn = norm_matrix(scheme, qn)
            fn = float(x @ kn @ x) - 1.0
            if fn >= f + ARMIJO * tq * gn:
                q, k, f = qn, kn, fn
                acc_q += 1
                tq *= 1.5
                break
            tq *= 0.5
        tx, tq = max(tx, 1e-8), max(tq, 1e-8)
        if history is not None:
            history.append(f)
        stall = stall + 1 if f - f_start <= 1e-16 else 0
        if stall >= config.stall_iters:
            break
    summary = RestartSummary(index, initial, f, it, acc_x, acc_q, stall >= config.stall_iters)
    return f, x, q, summary


def maximize(config):
    """Multi-start maximization of ``f`` over simplex x SO(N).

    Raises
    ------
    InternalInconsistencyError
        If the best value exceeds ``config.tol_accept``; the exception carries
        the full result as ``.result``.
    """
    scheme = IndexScheme.of(config.n)

    def job(index):
        return _run_restart(config, scheme, index)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            runs = list(pool.map(job, range(config.restarts)))
    else:
        runs = [job(i) for i in range(config.restarts)]

    best = max(range(len(runs)), key=lambda i: (runs[i][0], -i))
    f, x, q, _ = runs[best]
    result = SearchResult(config, f, x, q, [r[3] for r in runs],
                          stationarity(scheme, q, x), best)
    if f > config.tol_accept:
        err = InternalInconsistencyError(f"search found f = {f!r} > {config.tol_accept}")
        err.result = result
        raise err
    return result


def stationarity(scheme, q, x, active_threshold=None):
    """Lagrange residuals ``sum_b x_b ||[Q^_a, Q^_b]||^2 - 1`` at a point of the simplex.

    Coordinates above ``active_threshold`` (default ``1e-6 * max(x)``) share
    the multiplier ``a``; the others get their own ``b_a``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (scheme.N,) or np.any(x < -1e-12) or abs(x.sum() - 1.0) > 1e-9:
        raise InputError("x must lie on the unit simplex")
    if active_threshold is None:
        active_threshold = 1e-6 * float(x.max())
    k = norm_matrix(scheme, q)
    res = k @ x - 1.0
    mask = x > active_threshold
    active = [int(i) for i in np.flatnonzero(mask)]
    a = float(res[mask].mean())
    spread = float(np.max(np.abs(res[mask] - a)))
    b = {int(i): float(res[i]) for i in np.flatnonzero(~mask)}
    top = int(np.argmax(x))
    chain_rhs = float(sum(x[j] * k[top, j] for j in range(scheme.N) if j != top))
    return StationarityCertificate(
        active=active,
        a=a,
        b=b,
        spread=spread,
        normal_derivative=2.0 * (a * len(active) + sum(b.values())),
        chain_lhs=1.0 + a,
        chain_rhs=chain_rhs,
        residuals=res,
    )


@dataclass
class Classification:
    passed: bool
    weights: list
    residuals: dict


def classify_maximizers(result, scheme=None, tol=1e-4, reject_below=-0.1):
    """Check that a near-maximizer has the equality structure.

    Passes when exactly two coordinates are active with equal weight and the
    two corresponding ``Q^`` are traceless, rank 2 and anticommuting, all
    within ``tol``. Inputs with ``f <= reject_below`` are refused.
    """
    scheme = scheme or IndexScheme.of(result.config.n)
    if result.best_f <= reject_below:
        raise InputError(f"f = {result.best_f!r} is too far from the maximum to classify")
    cert = stationarity(scheme, result.Q, result.x)
    weights = [float(result.x[i]) for i in cert.active]
    residuals = {"gamma": cert.gamma, "f": result.best_f}
    if cert.gamma != 2:
        return Classification(False, weights, residuals)
    mats = basis_matrices(scheme, result.Q)[cert.active]
    qa, qb = mats
    sv = [np.linalg.svd(m_, compute_uv=False) for m_ in mats]
    residuals.update(
        weight_mismatch=abs(weights[0] - weights[1]),
        weight_offset=max(abs(w - 0.5) for w in weights),
        trace=max(abs(float(np.trace(m_))) for m_ in mats),
        anticommutator=math.sqrt(frob_sq(qa @ qb + qb @ qa)),
        third_singular_value=max(float(s[2]) if len(s) > 2 else 0.0 for s in sv),
        commutator_defect=abs(frob_sq(qa @ qb - qb @ qa) - 2.0),
    )
    checks = [v for key, v in residuals.items() if key not in ("gamma", "f")]
    return Classification(bool(max(checks) <= tol), weights, residuals)
