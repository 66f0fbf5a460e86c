"""Stability of the drift matrix and the stationary covariance matrix.

The stationary covariance solves ``A V + V A^T = -D``. It is computed with a
Schur-based (Bartels-Stewart) solver, and can be checked against a direct
fixed-step RK4 integration of ``dV/dt = A V + V A^T + D``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import (DomainError, InvalidParameterError, NumericalError,
                     ResourceError, UnstableSystemError)
from .model import DEFAULT_BASIS, QuadratureBasis, StateSpaceModel, SystemParams, symplectic_form

DEFAULT_STABILITY_TOL = 1e-10
RESIDUAL_RTOL = 1e-10
MAX_STEPS = 10**8
# above this many RK4 steps ``method="auto"`` composes the one-step map by squaring
_DOUBLING_THRESHOLD = 200_000


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float
    analytic_threshold: Optional[float] = None
    margin: Optional[float] = None
    eigenvalues: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "stable": self.stable,
            "max_real_part": self.max_real_part,
            "analytic_threshold": self.analytic_threshold,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric covariance matrix in a fixed quadrature basis.

    The input is symmetrized on construction.
    """

    entries: np.ndarray
    basis: QuadratureBasis = DEFAULT_BASIS

    def __post_init__(self):
        v = np.array(self.entries, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
            raise InvalidParameterError(f"covariance must be square with even size, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericalError("covariance matrix has non-finite entries")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)
        if self.basis.dim != v.shape[0]:
            object.__setattr__(self, "basis", QuadratureBasis(
                tuple(f"q{i}" for i in range(v.shape[0]))))

    @classmethod
    def vacuum(cls, n_modes: int = 4) -> "CovarianceMatrix":
        return cls(0.5 * np.eye(2 * n_modes))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.entries)


def symplectic_eigenvalues(v: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of ``v`` (ascending, one value per mode).

    Uses the Hermitian form ``i L^T Omega L`` with ``v = L L^T`` when ``v``
    is positive definite, falling back to the eigenvalues of ``i Omega v``.
    """
    v = v.entries if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    omega = symplectic_form(n)
    try:
        lower = np.linalg.cholesky(v)
    except np.linalg.LinAlgError:
        ev = np.abs(np.linalg.eigvals(1j * omega @ v))
    else:
        ev = np.abs(np.linalg.eigvalsh(1j * (lower.T @ omega @ lower)))
    ev = np.sort(ev)
    # eigenvalues come in +/- pairs
    return ev[::2]


def analytic_threshold(params: SystemParams) -> float:
    """Largest stable ``g2`` once the cooling cavity is adiabatically eliminated.

    ``G' = sqrt(g1^2 + (2 kappa / kappa3) g3^2)``, defined for
    ``kappa1 == kappa2 == kappa``.
    """
    if not math.isclose(params.kappa1, params.kappa2, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError(
            f"the analytic threshold requires kappa1 == kappa2 "
            f"(got {params.kappa1} and {params.kappa2})")
    kappa = params.kappa1
    return math.sqrt(params.g1 ** 2 + 2.0 * kappa / params.kappa3 * params.g3 ** 2)


def check_stability(model: StateSpaceModel, tol: float = DEFAULT_STABILITY_TOL) -> StabilityReport:
    """Stable iff every drift eigenvalue has real part below ``-tol``."""
    if not tol > 0:
        raise InvalidParameterError(f"tol must be > 0, got {tol}")
    try:
        eig = np.linalg.eigvals(model.drift)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NumericalError("eigenvalue solver returned non-finite values")
    max_re = float(np.max(eig.real))
    threshold = margin = None
    params = model.params
    if params is not None and math.isclose(params.kappa1, params.kappa2, rel_tol=1e-12):
        threshold = analytic_threshold(params)
        if threshold > 0:
            margin = (threshold - params.g2) / threshold
    return StabilityReport(
        stable=max_re < -tol,
        max_real_part=max_re,
        analytic_threshold=threshold,
        margin=margin,
        eigenvalues=eig,
    )


def lyapunov_residual(model: StateSpaceModel, v) -> float:
    """Frobenius norm of ``A V + V A^T + D``."""
    a = model.drift
    v = v.entries if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    return float(np.linalg.norm(a @ v + v @ a.T + model.diffusion))


def residual_bound(model: StateSpaceModel, v, rtol: float = RESIDUAL_RTOL) -> float:
    """Acceptance bound ``rtol * (|A|_F |V|_F + |D|_F)`` on the residual."""
    v = v.entries if isinstance(v, CovarianceMatrix) else np.asarray(v, dtype=float)
    return rtol * (np.linalg.norm(model.drift) * np.linalg.norm(v)
                   + np.linalg.norm(model.diffusion))


def _kronecker_operator(a: np.ndarray) -> np.ndarray:
    # row-major vec: vec(AV + VA^T) = (A (x) I + I (x) A) vec(V)
    eye = np.eye(a.shape[0])
    return np.kron(a, eye) + np.kron(eye, a)


def _solve_once(a, rhs, method):
    if method == "schur":
        return scipy.linalg.solve_continuous_lyapunov(a, rhs)
    n = a.shape[0]
    return np.linalg.solve(_kronecker_operator(a), rhs.reshape(-1)).reshape(n, n)


_SPLITTER = 134217729.0  # 2**27 + 1


def _two_prod(x, y):
    """Error-free product: ``x * y == p + e`` exactly (Dekker/Veltkamp)."""
    p = x * y
    t = _SPLITTER * x
    xh = t - (t - x)
    xl = x - xh
    t = _SPLITTER * y
    yh = t - (t - y)
    yl = y - yh
    e = xl * yl - (((p - xh * yh) - xl * yh) - xh * yl)
    return p, e


def _accurate_sum(terms):
    """Sum along the last axis as if in twice the working precision."""
    s = terms[..., 0].copy()
    c = np.zeros_like(s)
    for k in range(1, terms.shape[-1]):
        x = terms[..., k]
        t = s + x
        z = t - s
        c += (s - (t - z)) + (x - z)
        s = t
    return s + c


def accurate_residual(a: np.ndarray, v: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``A V + V A^T + D`` with compensated dot products.

    Every product is split into an exact pair and all terms are summed with
    error-free transformations, so the residual of a nearly exact ``V`` is
    resolved even when ``V`` has entries many orders of magnitude apart.
    """
    n = a.shape[0]
    # terms[i, j, :] = (A_ik V_kj)_k, (V_ik A_jk)_k
    p1, e1 = _two_prod(np.broadcast_to(a[:, None, :], (n, n, n)), v.T[None, :, :])
    p2, e2 = _two_prod(v[:, None, :], a[None, :, :])
    terms = np.concatenate([p1, p2, e1, e2, d[:, :, None]], axis=-1)
    return _accurate_sum(terms)


def solve_lyapunov(model: StateSpaceModel, method: str = "schur",
                   tol: float = DEFAULT_STABILITY_TOL, refine: int = 4) -> CovarianceMatrix:
    """Stationary covariance ``V`` with ``A V + V A^T = -D``.

    ``method`` is ``"schur"`` (Bartels-Stewart, default) or ``"kronecker"``
    (dense solve of the vectorized equation). The first solution is
    polished by up to ``refine`` rounds of iterative refinement against a
    compensated residual, which matters near the stability edge where the
    entries of ``V`` span ten or more orders of magnitude. Raises
    :class:`UnstableSystemError` when the drift is not strictly stable.
    """
    if method not in ("schur", "kronecker"):
        raise InvalidParameterError(f"unknown method {method!r}; use 'schur' or 'kronecker'")
    report = check_stability(model, tol)
    if not report.stable:
        raise UnstableSystemError(
            f"no stationary state: max real part of drift spectrum is {report.max_real_part:.6g}")
    a, d = model.drift, model.diffusion
    try:
        v = _solve_once(a, -d, method)
        v = 0.5 * (v + v.T)
        for _ in range(refine):
            residual = accurate_residual(a, v, d)
            if not np.any(residual):
                break
            correction = _solve_once(a, -residual, method)
            correction = 0.5 * (correction + correction.T)
            updated = v + correction
            if np.array_equal(updated, v):
                break
            v = updated
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(
            f"Lyapunov solve failed ({exc}); condition estimate "
            f"{np.linalg.cond(_kronecker_operator(a)):.3g}") from exc
    if not np.all(np.isfinite(v)) or lyapunov_residual(model, v) > residual_bound(model, v):
        raise NumericalError(
            "Lyapunov residual above tolerance; condition estimate "
            f"{np.linalg.cond(_kronecker_operator(a)):.3g}")
    return CovarianceMatrix(v, model.basis)


def default_time_step(model: StateSpaceModel) -> float:
    """``min(1e-3, 0.05 / |A|_F)``."""
    norm = float(np.linalg.norm(model.drift))
    return min(1e-3, 0.05 / norm) if norm > 0 else 1e-3


def _lyapunov_generator(a: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> A X + X A^T`` on upper-triangular coordinates of symmetric ``X``."""
    n = a.shape[0]
    iu = np.triu_indices(n)
    gen = np.empty((len(iu[0]), len(iu[0])))
    for col, (i, j) in enumerate(zip(*iu)):
        basis = np.zeros((n, n))
        basis[i, j] = basis[j, i] = 1.0
        m = a @ basis
        gen[:, col] = (m + m.T)[iu]
    return gen


def _rk4_increment(gen: np.ndarray, d: np.ndarray, h: float):
    """One RK4 step ``x -> x + K x + q`` of ``dx/dt = L x + d``, returned as ``(K, q)``.

    ``K = R(hL) - I`` is kept apart from the identity, and in extended
    precision, so that slowly decaying directions where ``K`` is tiny keep
    their relative accuracy through the squarings.
    """
    hl = np.longdouble(h) * gen.astype(np.longdouble)
    eye = np.eye(gen.shape[0], dtype=np.longdouble)
    m = eye + hl / 2.0 @ (eye + hl / 3.0 @ (eye + hl / 4.0))
    return hl @ m, np.longdouble(h) * (m @ d.astype(np.longdouble))


def _power_increment(k, q, nsteps):
    """Compose ``x -> x + K x + q`` with itself ``nsteps`` times by binary squaring."""
    size = k.shape[0]
    acc_k = np.zeros((size, size), dtype=k.dtype)
    acc_q = np.zeros(size, dtype=q.dtype)
    base_k, base_q = k, q
    count = int(nsteps)
    while count:
        if count & 1:
            acc_k, acc_q = acc_k + base_k + base_k @ acc_k, acc_q + base_q + base_k @ acc_q
        count >>= 1
        if count:
            base_k, base_q = 2.0 * base_k + base_k @ base_k, 2.0 * base_q + base_k @ base_q
    return acc_k, acc_q


def integrate_covariance(model: StateSpaceModel, v0, t_final: float,
                         dt: Optional[float] = None, method: str = "auto") -> CovarianceMatrix:
    """Integrate ``dV/dt = A V + V A^T + D`` from ``v0`` to ``t_final`` with classical RK4.

    The step count is ``ceil(t_final / dt)`` and the step is shrunk to land
    exactly on ``t_final``. ``method="step"`` runs the steps one by one;
    ``method="doubling"`` applies the same one-step map ``n`` times via
    repeated squaring, which gives the identical iterate in ``O(log n)``
    matrix products. The doubling path builds the RK4 propagator
    ``R(hL) = I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24`` of the Lyapunov
    operator ``L`` explicitly instead of calling the stepping kernel.
    ``"auto"`` switches to doubling for long runs.
    """
    if method not in ("auto", "step", "doubling"):
        raise InvalidParameterError(f"unknown method {method!r}")
    if dt is None:
        dt = default_time_step(model)
    if not (t_final > 0 and math.isfinite(t_final)):
        raise InvalidParameterError(f"t_final must be > 0, got {t_final}")
    if not (dt > 0 and math.isfinite(dt)):
        raise InvalidParameterError(f"dt must be > 0, got {dt}")
    ratio = t_final / dt
    if ratio > MAX_STEPS:
        raise ResourceError(f"{ratio:.3g} steps requested, limit is {MAX_STEPS:.0e}")
    nsteps = max(1, math.ceil(ratio - 1e-9))
    h = t_final / nsteps

    v0 = v0.entries if isinstance(v0, CovarianceMatrix) else np.asarray(v0, dtype=float)
    if v0.shape != model.drift.shape:
        raise InvalidParameterError(f"v0 shape {v0.shape} does not match drift {model.drift.shape}")
    v0 = 0.5 * (v0 + v0.T)
    a, d = model.drift, model.diffusion

    if method == "step" or (method == "auto" and nsteps <= _DOUBLING_THRESHOLD):
        v = _kernels.rk4_covariance(a, d, v0, h, nsteps)
    else:
        n = a.shape[0]
        iu = np.triu_indices(n)
        k, q = _rk4_increment(_lyapunov_generator(a), d[iu], h)
        kn, qn = _power_increment(k, q, nsteps)
        x0 = v0[iu]
        upper = (x0 + kn @ x0 + qn).astype(float)
        v = np.zeros((n, n))
        v[iu] = upper
        v = v + np.triu(v, 1).T
    if not np.all(np.isfinite(v)):
        raise NumericalError("covariance integration overflowed")
    return CovarianceMatrix(v, model.basis)
