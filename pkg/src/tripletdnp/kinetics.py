"""Phenomenological buildup and relaxation kinetics of the 1H polarization.

The polarization P(t) is driven toward the electron polarization pe with a
buildup time constant td and relaxes toward the thermal value pth with a
total relaxation time tr:

    dP/dt = (pe - P) / td - (P - pth) / tr

With pth omitted (it is ~1e-6 under the conditions modeled here) the
solution is a single exponential approach to pe / (1 + td/tr):

    P(t) = pe / (1 + td/tr) * (1 - exp(-t (1/td + 1/tr)))

Times are minutes throughout this module; the CLI boundary accepts seconds
with an explicit unit suffix and converts before calling in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN_J_PER_K, GAMMA_H_MHZ_PER_T, PLANCK_J_S
from .errors import ValidationError

__all__ = [
    "KineticsParams",
    "ValueKind",
    "BuildupCurve",
    "buildup_closed_form",
    "buildup_ode",
    "final_polarization",
    "steady_state_with_pth",
    "relaxation_decay",
    "thermal_polarization",
]


@dataclass(frozen=True)
class KineticsParams:
    """Rate-equation parameters: source polarization, time constants, thermal floor."""

    pe: float
    td_minutes: float
    tr_minutes: float
    pth: float = 0.0

    def __post_init__(self):
        if self.td_minutes <= 0.0:
            raise ValidationError(f"td_minutes must be positive, got {self.td_minutes}")
        if self.tr_minutes <= 0.0:
            raise ValidationError(f"tr_minutes must be positive, got {self.tr_minutes}")
        if abs(self.pe) > 1.0:
            raise ValidationError(f"|pe| <= 1 required, got {self.pe}")
        if abs(self.pth) > 1.0:
            raise ValidationError(f"|pth| <= 1 required, got {self.pth}")


class ValueKind(enum.Enum):
    """Whether curve values are absolute polarizations or raw NMR signal."""

    POLARIZATION = "polarization"
    RAW_SIGNAL = "raw_signal"


@dataclass(frozen=True)
class BuildupCurve:
    """Time-ordered (time, value) samples, simulated or measured."""

    times_min: np.ndarray
    values: np.ndarray
    value_kind: ValueKind = ValueKind.POLARIZATION

    def __post_init__(self):
        t = np.array(self.times_min, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValidationError("times and values must be 1-d arrays of equal length")
        if t.size == 0:
            raise ValidationError("curve must contain at least one sample")
        if t[0] < 0.0:
            raise ValidationError("times must be nonnegative")
        if np.any(np.diff(t) <= 0.0):
            raise ValidationError("times must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times_min", t)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.times_min.size)


def buildup_closed_form(params: KineticsParams, t_minutes):
    """Closed-form buildup with the thermal floor omitted.

    P(t) = pe / (1 + td/tr) * (1 - exp(-t (1/td + 1/tr))). Accepts a scalar
    or an array of times; negative times are rejected.
    """
    t = np.asarray(t_minutes, dtype=float)
    if np.any(t < 0.0):
        raise ValidationError("buildup time must be nonnegative")
    amp = final_polarization(params)
    rate = 1.0 / params.td_minutes + 1.0 / params.tr_minutes
    out = amp * (1.0 - np.exp(-t * rate))
    return float(out) if np.ndim(t_minutes) == 0 else out


def buildup_ode(params: KineticsParams, t_grid, include_pth: bool = False) -> BuildupCurve:
    """Integrate the rate equation on a time grid with fixed-step RK4.

    The grid must be strictly increasing and start at 0. The initial value
    is pth when include_pth is set, else 0 with the thermal term dropped.
    The step never exceeds min(td, tr)/1000, which keeps the integrator
    deterministic and far below the 1e-9 agreement required against the
    closed form.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.size == 0:
        raise ValidationError("time grid must not be empty")
    if grid[0] != 0.0:
        raise ValidationError("time grid must start at 0")
    if np.any(np.diff(grid) <= 0.0):
        raise ValidationError("time grid must be strictly increasing")

    pth = params.pth if include_pth else 0.0
    k = 1.0 / params.td_minutes + 1.0 / params.tr_minutes
    c = params.pe / params.td_minutes + pth / params.tr_minutes
    h_max = min(params.td_minutes, params.tr_minutes) / 1000.0

    p = pth if include_pth else 0.0
    values = [p]
    for i in range(grid.size - 1):
        span = grid[i + 1] - grid[i]
        n = max(1, math.ceil(span / h_max))
        h = span / n
        for _ in range(n):
            k1 = c - k * p
            k2 = c - k * (p + 0.5 * h * k1)
            k3 = c - k * (p + 0.5 * h * k2)
            k4 = c - k * (p + h * k3)
            p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        values.append(p)
    return BuildupCurve(grid, np.array(values), ValueKind.POLARIZATION)


def final_polarization(params: KineticsParams) -> float:
    """Attainable polarization pe / (1 + td/tr), the t -> infinity limit."""
    return params.pe / (1.0 + params.td_minutes / params.tr_minutes)


def steady_state_with_pth(params: KineticsParams) -> float:
    """Fixed point of the rate equation including the thermal floor.

    (pe/td + pth/tr) / (1/td + 1/tr); reduces to final_polarization for
    pth = 0.
    """
    num = params.pe / params.td_minutes + params.pth / params.tr_minutes
    den = 1.0 / params.td_minutes + 1.0 / params.tr_minutes
    return num / den


def relaxation_decay(p0: float, t_const_minutes: float, t_minutes, pth: float = 0.0):
    """Exponential relaxation P(t) = pth + (p0 - pth) exp(-t / t_const)."""
    if t_const_minutes <= 0.0:
        raise ValidationError(f"time constant must be positive, got {t_const_minutes}")
    t = np.asarray(t_minutes, dtype=float)
    if np.any(t < 0.0):
        raise ValidationError("decay time must be nonnegative")
    out = pth + (p0 - pth) * np.exp(-t / t_const_minutes)
    return float(out) if np.ndim(t_minutes) == 0 else out


def thermal_polarization(field_tesla: float, temperature_kelvin: float) -> float:
    """Thermal-equilibrium 1H polarization tanh(h nu / 2 kB T) at nu = gamma_H B.

    Takes the field magnitude only (nonnegative); the sign convention of the
    polarization axis is handled by the caller.
    """
    if field_tesla < 0.0:
        raise ValidationError(f"field magnitude must be >= 0, got {field_tesla}")
    if temperature_kelvin <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature_kelvin}")
    nu_hz = GAMMA_H_MHZ_PER_T * 1e6 * field_tesla
    return math.tanh(PLANCK_J_S * nu_hz / (2.0 * BOLTZMANN_J_PER_K * temperature_kelvin))
