"""Physical parameters, unit conventions and the linear Langevin model.

Every rate and frequency is stored as a multiple of ``2*pi*MHz``: entering
``omega_m=10`` means a mechanical angular frequency of 2*pi*10 MHz. Time is
therefore measured in units of ``1/(2*pi*MHz)``. Only
:func:`thermal_occupancy` converts to SI units.

Quadratures are ordered ``(dq, dp, dX1, dY1, dX2, dY2, dX3, dY3)`` and use the
``[X, Y] = i`` convention, so the vacuum variance of each quadrature is 1/2.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import DomainError, InvalidParameterError

#: Fixed quadrature ordering of every 8x8 matrix in the package.
BASIS_LABELS: tuple[str, ...] = ("dq", "dp", "dX1", "dY1", "dX2", "dY2", "dX3", "dY3")
N_QUADRATURES = len(BASIS_LABELS)

#: Ordering after mixing the target modes into EPR pairs.
EPR_LABELS: tuple[str, ...] = ("dq", "dp", "dX+", "dY+", "dX-", "dY-", "dX3", "dY3")

#: Mode identifier -> index of its first quadrature. ``"m"`` is the mechanics.
MODE_OFFSETS: dict[str, int] = {"m": 0, "1": 2, "2": 4, "3": 6}

# 1 unit of angular frequency in rad/s
_RAD_PER_S = 2.0 * math.pi * 1e6


def mode_id(label) -> str:
    """Normalize a mode identifier (``1``, ``"2"``, ``"m"``...) to its key."""
    key = str(label).strip().lower()
    if key not in MODE_OFFSETS:
        raise InvalidParameterError(
            f"unknown mode {label!r}; expected one of 1, 2, 3, m")
    return key


def mode_indices(label) -> tuple[int, int]:
    """Row/column indices ``(X, Y)`` of a mode in the quadrature basis."""
    off = MODE_OFFSETS[mode_id(label)]
    return off, off + 1


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class QuadratureBasis:
    """Immutable quadrature ordering with its symplectic form."""

    labels: tuple[str, ...] = BASIS_LABELS

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def omega(self) -> np.ndarray:
        return symplectic_form(self.dim // 2)


DEFAULT_BASIS = QuadratureBasis()
EPR_BASIS = QuadratureBasis(EPR_LABELS)


@dataclass(frozen=True)
class SystemParams:
    """Rates (in 2*pi*MHz) and bath temperature (K) of one system instance.

    ``g1``, ``g2`` and ``g3`` are the drive-enhanced couplings of the target
    cavities (1 red-detuned, 2 blue-detuned) and of the cooling cavity 3.
    ``nbar_override`` replaces the temperature-derived phonon occupancy.
    """

    omega_m: float
    gamma_m: float
    kappa1: float
    kappa2: float
    kappa3: float
    g1: float
    g2: float
    g3: float
    temperature: float = 0.0
    nbar_override: Optional[float] = None

    def __post_init__(self):
        for name in ("omega_m", "gamma_m", "kappa1", "kappa2", "kappa3",
                     "g1", "g2", "g3", "temperature"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or isinstance(value, bool):
                raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.omega_m <= 0:
            raise InvalidParameterError(f"omega_m must be > 0, got {self.omega_m}")
        for name in ("kappa1", "kappa2", "kappa3"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("gamma_m", "g1", "g2", "g3", "temperature"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.nbar_override is not None:
            nb = self.nbar_override
            if isinstance(nb, bool) or not math.isfinite(nb) or nb < 0:
                raise InvalidParameterError(f"nbar_override must be finite and >= 0, got {nb!r}")
            object.__setattr__(self, "nbar_override", float(nb))

    @property
    def nbar(self) -> float:
        """Mechanical bath occupancy actually used in the diffusion matrix."""
        if self.nbar_override is not None:
            return self.nbar_override
        return thermal_occupancy(self.omega_m, self.temperature)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class StateSpaceModel:
    """Drift and diffusion matrices of ``du/dt = A u + n`` for given params."""

    drift: np.ndarray
    diffusion: np.ndarray
    params: Optional[SystemParams] = None
    nbar: Optional[float] = None
    basis: QuadratureBasis = field(default=DEFAULT_BASIS)

    def __post_init__(self):
        a = np.array(self.drift, dtype=float)
        d = np.array(self.diffusion, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidParameterError(f"drift must be square, got shape {a.shape}")
        if d.shape != a.shape:
            raise InvalidParameterError(
                f"diffusion shape {d.shape} does not match drift shape {a.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(d))):
            raise InvalidParameterError("drift and diffusion must be finite")
        a.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "drift", a)
        object.__setattr__(self, "diffusion", d)

    @property
    def dim(self) -> int:
        return self.drift.shape[0]


def thermal_occupancy(omega_m: float, temperature: float) -> float:
    """Bose-Einstein occupancy of a mode at ``omega_m`` (2*pi*MHz) and ``temperature`` (K).

    Evaluated as ``1 / expm1(x)`` with ``x = hbar * omega / (k_B * T)`` so
    the high-temperature limit ``1/x - 1/2`` is reproduced without
    cancellation.
    """
    if not omega_m > 0 or not math.isfinite(omega_m):
        raise InvalidParameterError(f"omega_m must be > 0, got {omega_m!r}")
    if not temperature >= 0 or not math.isfinite(temperature):
        raise InvalidParameterError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = hbar * omega_m * _RAD_PER_S / (k_B * temperature)
    if x > 700:
        return 0.0 if x > 745 else math.exp(-x)
    return 1.0 / math.expm1(x)


def build_drift(params: SystemParams) -> np.ndarray:
    """Drift matrix of the linearized Heisenberg-Langevin equations."""
    p = params
    wm = p.omega_m
    a = np.zeros((N_QUADRATURES, N_QUADRATURES))
    # mechanics
    a[0, 1] = wm
    a[1, 0] = -wm
    a[1, 1] = -p.gamma_m
    # cavities 1 and 3 rotate as red-sideband, 2 as blue-sideband
    for (ix, iy), kappa, g, sign in (
        ((2, 3), p.kappa1, p.g1, 1.0),
        ((4, 5), p.kappa2, p.g2, -1.0),
        ((6, 7), p.kappa3, p.g3, 1.0),
    ):
        a[ix, ix] = -kappa
        a[iy, iy] = -kappa
        a[ix, iy] = sign * wm
        a[iy, ix] = -sign * wm
        a[1, ix] = g
        a[iy, 0] = g
    return a


def build_diffusion(params: SystemParams) -> np.ndarray:
    """Diagonal diffusion matrix ``Diag[0, gamma_m(2n+1), k1, k1, k2, k2, k3, k3]``."""
    p = params
    return np.diag([
        0.0,
        p.gamma_m * (2.0 * p.nbar + 1.0),
        p.kappa1, p.kappa1,
        p.kappa2, p.kappa2,
        p.kappa3, p.kappa3,
    ])


def build_model(params: SystemParams) -> StateSpaceModel:
    return StateSpaceModel(
        drift=build_drift(params),
        diffusion=build_diffusion(params),
        params=params,
        nbar=params.nbar,
    )


def bogoliubov_transform(g1: float, g2: float) -> tuple[np.ndarray, float]:
    """Map ``(dX1, dY1, dX2, dY2)`` onto the Bogoliubov pair ``(dX, dY, dX', dY')``.

    Returns the 4x4 matrix and the effective coupling
    ``G~ = sqrt(g1**2 - g2**2)``. Only defined for ``g1 > g2 >= 0``; at
    ``g2 == g1`` the effective coupling vanishes and the mode picture
    breaks down.

    The second pair is ``dX' = (g2 X1 + g1 X2)/G~`` and
    ``dY' = (g1 Y2 - g2 Y1)/G~``; this sign of ``dY'`` is the one that keeps
    ``[dX', dY'] = i``.
    """
    if not (math.isfinite(g1) and math.isfinite(g2)) or g2 < 0:
        raise InvalidParameterError(f"couplings must be finite and >= 0, got ({g1}, {g2})")
    if not g2 < g1:
        raise DomainError(
            f"Bogoliubov modes require g2 < g1 (got g1={g1}, g2={g2}); "
            "the effective coupling sqrt(g1^2 - g2^2) is not real and positive")
    gt = math.sqrt((g1 - g2) * (g1 + g2))
    s = np.array([
        [g1, 0.0, g2, 0.0],
        [0.0, g1, 0.0, -g2],
        [g2, 0.0, g1, 0.0],
        [0.0, -g2, 0.0, g1],
    ]) / gt
    return s, gt


def epr_transform() -> np.ndarray:
    """Orthogonal map ``(dX1, dY1, dX2, dY2) -> (dX+, dY+, dX-, dY-)``."""
    r = 1.0 / math.sqrt(2.0)
    return np.array([
        [r, 0.0, r, 0.0],
        [0.0, r, 0.0, r],
        [r, 0.0, -r, 0.0],
        [0.0, r, 0.0, -r],
    ])


def embed_transform(s: np.ndarray, modes=("1", "2")) -> np.ndarray:
    """Extend a transform acting on ``modes`` to the full 8x8 space by identity."""
    s = np.asarray(s, dtype=float)
    idx = [k for label in modes for k in mode_indices(label)]
    if len(set(idx)) != len(idx):
        raise InvalidParameterError(f"repeated mode in {modes!r}")
    if s.shape != (len(idx), len(idx)):
        raise InvalidParameterError(
            f"transform of shape {s.shape} does not act on {len(idx)} quadratures")
    full = np.eye(N_QUADRATURES)
    full[np.ix_(idx, idx)] = s
    return full


def change_basis(model: StateSpaceModel, f: np.ndarray,
                 basis: Optional[QuadratureBasis] = None) -> StateSpaceModel:
    """Express ``model`` in the quadratures ``u' = F u``.

    The drift becomes ``F A F^-1`` and the diffusion ``F D F^T``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != model.drift.shape:
        raise InvalidParameterError(f"transform shape {f.shape} does not match model {model.drift.shape}")
    if np.allclose(f @ f.T, np.eye(f.shape[0]), rtol=0, atol=1e-14):
        f_inv = f.T
    else:
        f_inv = np.linalg.inv(f)
    return StateSpaceModel(
        drift=f @ model.drift @ f_inv,
        diffusion=f @ model.diffusion @ f.T,
        params=model.params,
        nbar=model.nbar,
        basis=basis if basis is not None else QuadratureBasis(
            tuple(f"u{i}" for i in range(f.shape[0]))),
    )


def epr_model(model: StateSpaceModel) -> StateSpaceModel:
    """``model`` with target modes 1 and 2 replaced by their EPR pairs."""
    return change_basis(model, embed_transform(epr_transform()), EPR_BASIS)
