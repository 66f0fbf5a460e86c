"""Two-mode logarithmic negativity and EPR-type variance witnesses.

The covariance blocks of a mode pair are called ``block_a`` (first mode),
``block_b`` (second mode) and ``block_c`` (cross correlations), so that

    V_ij = [[block_a, block_c],
            [block_c^T, block_b]].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidParameterError, NumericalError
from .model import (DEFAULT_BASIS, EPR_BASIS, StateSpaceModel, embed_transform, epr_model, epr_transform,
                    mode_id, mode_indices)
from .steady_state import CovarianceMatrix, solve_lyapunov

# round-off allowance for the discriminant and the squared eigenvalue
_ROUNDOFF = 1e-12
# relative size of sigma^2 - 4 det V below which the symplectic eigenvalues count as degenerate
_NEAR_DEGENERATE = 1e-6


@dataclass(frozen=True)
class TwoModeCovariance:
    """4x4 covariance of a mode pair, ordered ``(X_i, Y_i, X_j, Y_j)``."""

    entries: np.ndarray
    labels: tuple[str, str] = ("1", "2")

    def __post_init__(self):
        v = np.array(self.entries, dtype=float)
        if v.shape != (4, 4):
            raise InvalidParameterError(f"two-mode covariance must be 4x4, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericalError("two-mode covariance has non-finite entries")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "entries", v)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @property
    def block_a(self) -> np.ndarray:
        return self.entries[:2, :2]

    @property
    def block_b(self) -> np.ndarray:
        return self.entries[2:, 2:]

    @property
    def block_c(self) -> np.ndarray:
        return self.entries[:2, 2:]


@dataclass(frozen=True)
class EntanglementReport:
    log_negativity: float
    eta_minus: float
    sigma: float
    det_block_a: float
    det_block_b: float
    det_block_c: float
    det_v: float
    duan_plus: Optional[float] = None
    duan_minus: Optional[float] = None
    labels: tuple[str, str] = ("1", "2")

    def as_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "log_negativity": self.log_negativity,
            "eta_minus": self.eta_minus,
            "sigma": self.sigma,
            "det_block_a": self.det_block_a,
            "det_block_b": self.det_block_b,
            "det_block_c": self.det_block_c,
            "det_v": self.det_v,
            "duan_plus": self.duan_plus,
            "duan_minus": self.duan_minus,
        }


def _entries(v) -> np.ndarray:
    if isinstance(v, (CovarianceMatrix, TwoModeCovariance)):
        return v.entries
    return np.asarray(v, dtype=float)


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def extract_pair(v, i, j) -> TwoModeCovariance:
    """Restrict an 8x8 covariance to modes ``i`` and ``j`` (each one of 1, 2, 3, m)."""
    ki, kj = mode_id(i), mode_id(j)
    if ki == kj:
        raise InvalidParameterError(f"a mode pair needs two different modes, got {i!r} twice")
    if isinstance(v, CovarianceMatrix) and v.basis != DEFAULT_BASIS:
        raise InvalidParameterError("mode pairs are defined in the original quadrature basis")
    m = _entries(v)
    if m.shape != (8, 8):
        raise InvalidParameterError(f"expected an 8x8 covariance, got {m.shape}")
    idx = list(mode_indices(ki)) + list(mode_indices(kj))
    return TwoModeCovariance(m[np.ix_(idx, idx)], (ki, kj))


def _pt_symplectic_min(w: np.ndarray) -> float:
    """Smaller symplectic eigenvalue of the partial transpose via a Hermitian eigenproblem."""
    flip = np.array([1.0, 1.0, 1.0, -1.0])
    vt = w * np.outer(flip, flip)
    lower = np.linalg.cholesky(vt)
    omega = np.array([[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0],
                      [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]])
    return float(np.min(np.abs(np.linalg.eigvalsh(1j * (lower.T @ omega @ lower)))))


def log_negativity(tm) -> EntanglementReport:
    """Logarithmic negativity ``max(0, -ln 2 eta)`` of a two-mode Gaussian state.

    ``eta`` is the smaller symplectic eigenvalue of the partial transpose,
    ``eta^2 = (sigma - sqrt(sigma^2 - 4 det V)) / 2`` with
    ``sigma = det A + det B - 2 det C``. The square is evaluated in the
    equivalent form ``2 det V / (sigma + sqrt(sigma^2 - 4 det V))`` and
    ``det V`` as the product of the eigenvalues of ``V``, which keeps
    strongly correlated, hot states free of cancellation. When the two
    symplectic eigenvalues nearly coincide the square root amplifies
    round-off, and ``eta`` is taken from a Hermitian eigenproblem instead.
    """
    if not isinstance(tm, TwoModeCovariance):
        tm = TwoModeCovariance(tm)
    w = tm.entries
    det_a = _det2(tm.block_a)
    det_b = _det2(tm.block_b)
    det_c = _det2(tm.block_c)
    eig = np.linalg.eigvalsh(w)
    if eig[0] <= 0:
        raise NumericalError(
            f"unphysical covariance: not positive definite (smallest eigenvalue {eig[0]:.3g})")
    det_v = float(np.prod(eig))
    sigma = det_a + det_b - 2.0 * det_c

    disc = sigma * sigma - 4.0 * det_v
    if disc < 0:
        if disc < -_ROUNDOFF * max(sigma * sigma, 1.0):
            raise NumericalError(
                f"unphysical covariance: sigma^2 - 4 det V = {disc:.3g} < 0")
        disc = 0.0
    root = math.sqrt(disc)
    denom = sigma + root
    if denom <= 0:
        raise NumericalError(f"unphysical covariance: sigma = {sigma:.6g}")
    eta_sq = 2.0 * det_v / denom
    if eta_sq < 0:
        if eta_sq < -_ROUNDOFF:
            raise NumericalError(f"unphysical covariance: eta^2 = {eta_sq:.3g} < 0")
        eta_sq = 0.0
    if disc < _NEAR_DEGENERATE * sigma * sigma:
        eta = _pt_symplectic_min(w)
    else:
        eta = math.sqrt(eta_sq)
    if eta == 0.0:
        raise NumericalError("unphysical covariance: vanishing symplectic eigenvalue")
    en = max(0.0, -math.log(2.0 * eta))
    return EntanglementReport(
        log_negativity=en, eta_minus=eta, sigma=sigma,
        det_block_a=det_a, det_block_b=det_b, det_block_c=det_c, det_v=det_v,
        labels=tm.labels,
    )


def duan_sums(v) -> tuple[float, float]:
    """EPR variance sums of target modes 1 and 2.

    Returns ``(<dX+^2> + <dY-^2>, <dX-^2> + <dY+^2>)`` with
    ``dX+- = (dX1 +- dX2)/sqrt(2)`` and likewise for ``dY``. Each sum is 1
    for vacuum; a value below 1 certifies entanglement.

    ``v`` may be given in the original basis or, for better accuracy, in
    the EPR basis as returned by :func:`epr_covariance`.
    """
    if isinstance(v, CovarianceMatrix) and v.basis == EPR_BASIS:
        w = v.entries[2:6, 2:6]
    else:
        m = _entries(v)
        if m.shape != (8, 8):
            raise InvalidParameterError(f"expected an 8x8 covariance, got {m.shape}")
        s = epr_transform()
        w = s @ m[2:6, 2:6] @ s.T
    # w is ordered (X+, Y+, X-, Y-)
    return float(w[0, 0] + w[3, 3]), float(w[2, 2] + w[1, 1])


def epr_covariance(model: StateSpaceModel) -> CovarianceMatrix:
    """Stationary covariance solved directly in the EPR basis of modes 1 and 2.

    The original-basis covariance can hold entries of order 1e9 whose
    combinations give EPR variances of order 1; solving in the rotated
    basis keeps those variances at full precision.
    """
    return solve_lyapunov(epr_model(model))


def analyze_pair(v, i=1, j=2, model: Optional[StateSpaceModel] = None) -> EntanglementReport:
    """Negativity report for modes ``i`` and ``j``; Duan sums added for the pair (1, 2).

    When ``model`` is given the Duan sums come from :func:`epr_covariance`.
    """
    report = log_negativity(extract_pair(v, i, j))
    if {mode_id(i), mode_id(j)} == {"1", "2"}:
        plus, minus = duan_sums(epr_covariance(model) if model is not None else v)
        report = EntanglementReport(**{**report.__dict__, "duan_plus": plus, "duan_minus": minus})
    return report


def transform_covariance(v, s, modes: Optional[Sequence] = None) -> CovarianceMatrix:
    """Congruence ``S V S^T``, with ``S`` acting on the quadratures of ``modes``.

    Rows and columns of modes outside ``modes`` are left untouched. Without
    ``modes`` the matrix ``s`` must act on the full space.
    """
    m = _entries(v)
    s = np.asarray(s, dtype=float)
    n = m.shape[0]
    if modes is None:
        if s.shape != (n, n):
            raise InvalidParameterError(f"transform of shape {s.shape} does not match covariance {m.shape}")
        full = s
    else:
        if n != 8:
            raise InvalidParameterError(f"mode-indexed transforms need an 8x8 covariance, got {m.shape}")
        full = embed_transform(s, modes)
    return CovarianceMatrix(full @ m @ full.T)
