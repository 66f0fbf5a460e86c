"""One-dimensional parameter sweeps and the figure presets."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .entanglement import analyze_pair
from .errors import InvalidParameterError
from .model import SystemParams, build_model, mode_id
from .steady_state import check_stability, solve_lyapunov

SWEEP_AXES = ("g1", "g2", "g3", "temperature")


def linear_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid ``start, start+step, ..., stop`` rounded to 10 decimals."""
    if not step > 0:
        raise InvalidParameterError(f"step must be > 0, got {step}")
    count = int(round((stop - start) / step)) + 1
    if count < 1:
        raise InvalidParameterError(f"empty grid [{start}, {stop}]")
    return tuple(float(x) for x in np.round(start + step * np.arange(count), 10))


def log_grid(start: float, stop: float, count: int) -> tuple[float, ...]:
    if not (start > 0 and stop > 0 and count >= 1):
        raise InvalidParameterError("log grid needs positive bounds and count >= 1")
    return tuple(float(x) for x in np.geomspace(start, stop, count))


@dataclass(frozen=True)
class SweepSpec:
    """Sweep of one parameter of ``base`` over ``values``.

    With ``lock_g2_to_g1`` every point uses ``g2 = g1``.
    """

    base: SystemParams
    axis: str
    values: tuple[float, ...]
    lock_g2_to_g1: bool = False
    pair: tuple[str, str] = ("1", "2")
    label: str = ""

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise InvalidParameterError(
                f"cannot sweep {self.axis!r}; choose one of {', '.join(SWEEP_AXES)}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InvalidParameterError("sweep values must not be empty")
        if not all(math.isfinite(v) for v in values):
            raise InvalidParameterError("sweep values must be finite")
        if self.lock_g2_to_g1 and self.axis == "g2":
            raise InvalidParameterError("lock_g2_to_g1 cannot be combined with axis g2")
        pair = (mode_id(self.pair[0]), mode_id(self.pair[1]))
        if pair[0] == pair[1]:
            raise InvalidParameterError(f"pair needs two different modes, got {self.pair!r}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "pair", pair)
        for v in values:  # fail before any evaluation
            self.params_at(v)

    def params_at(self, value: float) -> SystemParams:
        changes = {self.axis: value}
        if self.lock_g2_to_g1:
            changes["g2"] = value if self.axis == "g1" else self.base.g1
        return self.base.replace(**changes)


@dataclass(frozen=True)
class SweepRow:
    index: int
    axis_value: float
    stable: bool
    max_real_part: float
    log_negativity: Optional[float] = None
    eta_minus: Optional[float] = None
    duan_plus: Optional[float] = None
    duan_minus: Optional[float] = None


def evaluate_point(spec: SweepSpec, index: int) -> SweepRow:
    value = spec.values[index]
    model = build_model(spec.params_at(value))
    stability = check_stability(model)
    if not stability.stable:
        return SweepRow(index, value, False, stability.max_real_part)
    report = analyze_pair(solve_lyapunov(model), *spec.pair, model=model)
    return SweepRow(
        index=index,
        axis_value=value,
        stable=True,
        max_real_part=stability.max_real_part,
        log_negativity=report.log_negativity,
        eta_minus=report.eta_minus,
        duan_plus=report.duan_plus,
        duan_minus=report.duan_minus,
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate every point of ``spec``; unstable points become rows with no measures.

    ``workers > 1`` evaluates points on a thread pool. Rows are always
    returned in the order of ``spec.values``.
    """
    n = len(spec.values)
    if workers <= 1:
        return [evaluate_point(spec, i) for i in range(n)]
    rows: list[Optional[SweepRow]] = [None] * n
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(evaluate_point, spec, i): i for i in range(n)}
        for fut, i in futures.items():
            rows[i] = fut.result()
    return rows


def max_log_negativity(rows: Sequence[SweepRow]) -> tuple[Optional[float], Optional[float]]:
    """Grid maximum of ``E_N`` over stable rows as ``(value, axis_value)``."""
    best = None
    for row in rows:
        if row.stable and (best is None or row.log_negativity > best.log_negativity):
            best = row
    if best is None:
        return None, None
    return best.log_negativity, best.axis_value


#: Rates shared by all figure presets (2*pi*MHz) and the 300 mK bath.
FIGURE_BASE = SystemParams(
    omega_m=10.0, gamma_m=1e-4, kappa1=0.02, kappa2=0.02, kappa3=0.5,
    g1=2.0, g2=2.0, g3=0.8, temperature=0.3,
)

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6")


def figure_preset(name: str) -> list[SweepSpec]:
    """One sweep per plotted series of figures 2 to 6."""
    base = FIGURE_BASE
    if name == "fig2":
        grid = linear_grid(0.0, 2.2, 0.01)
        return [SweepSpec(base.replace(g3=g3), "g2", grid, label=f"fig2_g3_{g3:g}")
                for g3 in (0.0, 0.8)]
    if name == "fig3":
        grid = linear_grid(0.0, 1.5, 0.01)
        return [SweepSpec(base.replace(g2=g2), "g3", grid, label=f"fig3_g2_{g2:g}")
                for g2 in (1.9, 2.0)]
    if name == "fig4":
        grid = linear_grid(0.05, 3.0, 0.01)
        return [SweepSpec(base, "g1", grid, lock_g2_to_g1=True, label="fig4_g2_eq_g1")]
    if name == "fig5":
        grid = linear_grid(0.0, 1.5, 0.01)
        return [SweepSpec(base.replace(temperature=300.0), "g3", grid, label="fig5_T_300")]
    if name == "fig6":
        grid = log_grid(1e-3, 300.0, 200)
        return [SweepSpec(base.replace(g2=g2), "temperature", grid, label=f"fig6_g2_{g2:g}")
                for g2 in (1.9, 1.95, 2.0)]
    raise InvalidParameterError(f"unknown figure {name!r}; valid names: {', '.join(FIGURES)}")
