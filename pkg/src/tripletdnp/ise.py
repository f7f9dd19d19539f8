"""Integrated-solid-effect shot model.

One shot is a laser pulse followed by a microwave window during which the
static field is swept; the electron Rabi frequency is matched to the 1H
Larmor frequency (Hartmann-Hahn condition) so polarization transfers during
the passage. The per-shot transfer toward the electron polarization is a
small fraction epsilon; repeating shots at the sequence repetition rate
produces the macroscopic buildup rate 1/td = epsilon / shot_period.

The sweep passage is modeled with the Landau-Zener adiabatic-transition
formula for a linear sweep. That is a model choice, not a first-principles
result; the test suite checks it against direct numerical integration of
the two-level Schrodinger equation across the sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .constants import GAMMA_E_MHZ_PER_T, GAMMA_H_MHZ_PER_T, SECONDS_PER_MINUTE
from .errors import ValidationError

__all__ = [
    "IseSequenceParams",
    "ShotModel",
    "BuildupTime",
    "hartmann_hahn_b1",
    "proton_larmor",
    "sweep_transfer_probability",
    "effective_buildup_time",
    "epsilon_for_buildup_time",
    "shot_map",
    "iterate_shots",
]


@dataclass(frozen=True)
class IseSequenceParams:
    """Timing and field parameters of one ISE shot.

    The microwave window opens microwave_delay_us after the laser trigger,
    so the laser pulse (laser_width_us) must fit before it, and the window
    must close before the next shot starts.
    """

    microwave_frequency_ghz: float
    microwave_width_us: float
    laser_width_us: float
    repetition_rate_hz: float
    sweep_span_mt: float
    b1_amplitude_mt: float
    static_field_tesla: float
    microwave_delay_us: float = 2.0

    def __post_init__(self):
        for name in (
            "microwave_frequency_ghz",
            "microwave_width_us",
            "laser_width_us",
            "repetition_rate_hz",
            "b1_amplitude_mt",
            "static_field_tesla",
            "microwave_delay_us",
        ):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        # zero span means no sweep (adiabatic limit of the passage), so it is allowed
        if self.sweep_span_mt < 0.0:
            raise ValidationError(f"sweep_span_mt must be >= 0, got {self.sweep_span_mt}")
        period_us = 1e6 / self.repetition_rate_hz
        if self.microwave_delay_us + self.microwave_width_us > period_us:
            raise ValidationError(
                "microwave window must fit in one shot period: "
                f"delay {self.microwave_delay_us} us + width {self.microwave_width_us} us "
                f"> period {period_us} us"
            )
        if self.laser_width_us >= self.microwave_delay_us:
            raise ValidationError(
                "laser pulse must end before the microwave window: "
                f"laser width {self.laser_width_us} us >= delay {self.microwave_delay_us} us"
            )

    @property
    def shot_period_s(self) -> float:
        return 1.0 / self.repetition_rate_hz


@dataclass(frozen=True)
class ShotModel:
    """Per-shot fractional transfer toward pe and the shot period."""

    epsilon: float
    shot_period_s: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.shot_period_s <= 0.0:
            raise ValidationError(f"shot_period_s must be positive, got {self.shot_period_s}")


class BuildupTime(NamedTuple):
    """Buildup time constant in minutes; finite is False for a zero-transfer shot."""

    minutes: float
    finite: bool


def hartmann_hahn_b1(static_field_tesla: float) -> float:
    """Microwave field amplitude B1 (mT) matching the electron Rabi frequency
    to the 1H Larmor frequency at the given static field."""
    if static_field_tesla <= 0.0:
        raise ValidationError(f"static field must be positive, got {static_field_tesla}")
    return static_field_tesla * GAMMA_H_MHZ_PER_T / GAMMA_E_MHZ_PER_T * 1e3


def proton_larmor(static_field_tesla: float) -> float:
    """1H Larmor frequency in MHz."""
    if static_field_tesla <= 0.0:
        raise ValidationError(f"static field must be positive, got {static_field_tesla}")
    return GAMMA_H_MHZ_PER_T * static_field_tesla


def sweep_transfer_probability(params: IseSequenceParams) -> float:
    """Adiabatic transfer probability of one swept-field passage.

    Landau-Zener for a linear sweep: p = 1 - exp(-pi w1^2 / (2 |dDelta/dt|))
    with w1 = gamma_e * b1 and dDelta/dt = gamma_e * sweep_span / width, both
    angular. A zero sweep rate is the adiabatic limit and returns 1 (with
    drive present), not an error.
    """
    gamma_ang = 2.0 * math.pi * GAMMA_E_MHZ_PER_T * 1e6  # rad/s/T
    omega1 = gamma_ang * params.b1_amplitude_mt * 1e-3
    sweep_rate = gamma_ang * params.sweep_span_mt * 1e-3 / (params.microwave_width_us * 1e-6)
    return _landau_zener(omega1, sweep_rate)


def _landau_zener(omega1_rad_s: float, sweep_rate_rad_s2: float) -> float:
    if sweep_rate_rad_s2 == 0.0:
        return 1.0 if omega1_rad_s > 0.0 else 0.0
    p = 1.0 - math.exp(-math.pi * omega1_rad_s**2 / (2.0 * abs(sweep_rate_rad_s2)))
    return min(1.0, max(0.0, p))


def effective_buildup_time(shot: ShotModel) -> BuildupTime:
    """Buildup time constant implied by the shot model: td = period / epsilon.

    epsilon = 0 never builds up; that returns an infinite sentinel with the
    finite flag cleared instead of raising.
    """
    if shot.epsilon == 0.0:
        return BuildupTime(math.inf, False)
    return BuildupTime(shot.shot_period_s / shot.epsilon / SECONDS_PER_MINUTE, True)


def epsilon_for_buildup_time(td_minutes: float, shot_period_s: float) -> float:
    """Per-shot transfer fraction that reproduces a measured buildup time."""
    if td_minutes <= 0.0:
        raise ValidationError(f"td_minutes must be positive, got {td_minutes}")
    if shot_period_s <= 0.0:
        raise ValidationError(f"shot_period_s must be positive, got {shot_period_s}")
    eps = shot_period_s / (SECONDS_PER_MINUTE * td_minutes)
    if eps > 1.0:
        raise ValidationError(
            f"buildup time {td_minutes} min is shorter than one shot period; no epsilon <= 1 exists"
        )
    return eps


def shot_map(p_now: float, shot: ShotModel, pe: float, tr_minutes: float, pth: float = 0.0) -> float:
    """Polarization after one shot: gain epsilon (pe - p), relax (dt/tr)(p - pth).

    The result is clamped to [-1, 1]; for admissible parameters the map is a
    convex step toward a fixed point inside the interval and the clamp never
    engages.
    """
    if abs(p_now) > 1.0:
        raise ValidationError(f"|polarization| <= 1 required, got {p_now}")
    if abs(pe) > 1.0 or abs(pth) > 1.0:
        raise ValidationError("|pe| and |pth| must not exceed 1")
    if tr_minutes <= 0.0:
        raise ValidationError(f"tr_minutes must be positive, got {tr_minutes}")
    delta = shot.shot_period_s / (SECONDS_PER_MINUTE * tr_minutes)
    p = p_now + shot.epsilon * (pe - p_now) - delta * (p_now - pth)
    return min(1.0, max(-1.0, p))


def iterate_shots(
    p0: float, shot: ShotModel, pe: float, tr_minutes: float, pth: float, n_shots: int
) -> float:
    """Apply shot_map n_shots times.

    The map is affine, p -> a p + b with a = 1 - epsilon - dt/tr, so when a
    stays in [0, 1) and the fixed point lies in [-1, 1] the n-fold
    composition has the exact closed form a^n p0 + (1 - a^n) b/(1 - a) and
    no clamp can engage. Outside that regime the shots are stepped
    explicitly.
    """
    if n_shots < 0:
        raise ValidationError(f"n_shots must be >= 0, got {n_shots}")
    if tr_minutes <= 0.0:
        raise ValidationError(f"tr_minutes must be positive, got {tr_minutes}")
    if abs(pe) > 1.0 or abs(pth) > 1.0:
        raise ValidationError("|pe| and |pth| must not exceed 1")
    if n_shots == 0:
        return p0
    delta = shot.shot_period_s / (SECONDS_PER_MINUTE * tr_minutes)
    s = shot.epsilon + delta
    a = 1.0 - s
    if s == 0.0:
        return p0
    if 0.0 <= a < 1.0 and abs(p0) <= 1.0:
        fixed_point = (shot.epsilon * pe + delta * pth) / s
        if abs(fixed_point) <= 1.0:
            an = a**n_shots
            return an * p0 + (1.0 - an) * fixed_point
    p = p0
    for _ in range(n_shots):
        p = shot_map(p, shot, pe, tr_minutes, pth)
    return p
