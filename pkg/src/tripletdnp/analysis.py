"""Fitting measured curves to the kinetics model and calibrating polarization.

Exponential models are fitted with a damped Gauss-Newton iteration using
analytic Jacobians; starting values come from log-linearized estimates.
Non-convergence is a reported state on the result, never an exception. A
buildup curve alone only determines the asymptote and the total rate, so
separating the buildup time from the relaxation time requires an
independently measured relaxation constant (disentangle_buildup).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, ValidationError
from .kinetics import BuildupCurve, KineticsParams

__all__ = [
    "FitResult",
    "RelaxationDecomposition",
    "NmrCalibration",
    "fit_decay",
    "fit_buildup",
    "disentangle_buildup",
    "decompose_relaxation",
    "calibrate_polarization",
]

MAX_ITERATIONS = 200
STEP_TOL = 1e-10
_STEP_FLOOR = 1e-13  # keep polishing past STEP_TOL so the optimum is hit to float noise
_MIN_SAMPLES = 4


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with one-sigma uncertainties from the residual covariance.

    residual_norm is the root-mean-square residual. gradient_norm is the
    max-norm of J^T r at the returned point; a converged fit has driven it
    to numerical noise.
    """

    parameters: dict[str, float]
    uncertainties: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int
    gradient_norm: float = 0.0
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        for name, u in self.uncertainties.items():
            if not (u >= 0.0 or math.isnan(u)):
                raise ValidationError(f"uncertainty for {name} must be nonnegative, got {u}")


@dataclass(frozen=True)
class RelaxationDecomposition:
    """Split of the total relaxation rate: 1/tr = 1/t1 + 1/te."""

    t1_minutes: float
    tr_minutes: float
    te_minutes: float

    def __post_init__(self):
        if min(self.t1_minutes, self.tr_minutes, self.te_minutes) <= 0.0:
            raise ValidationError("all decomposition time constants must be positive")
        lhs = 1.0 / self.tr_minutes
        rhs = 1.0 / self.t1_minutes + 1.0 / self.te_minutes
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise ValidationError("decomposition must satisfy 1/tr = 1/t1 + 1/te within 1e-9 relative")


@dataclass(frozen=True)
class NmrCalibration:
    """Signal comparison against a thermally polarized reference sample.

    spin_count_ratio is (reference 1H count) / (sample 1H count); gain_ratio
    corrects for different receiver gains between the two measurements.
    """

    enhanced_signal: float
    reference_signal: float
    reference_thermal_polarization: float
    spin_count_ratio: float = 1.0
    gain_ratio: float = 1.0

    def __post_init__(self):
        if self.reference_signal == 0.0:
            raise ValidationError("reference_signal must be nonzero")
        if self.spin_count_ratio <= 0.0 or self.gain_ratio <= 0.0:
            raise ValidationError("spin_count_ratio and gain_ratio must be positive")


def _log_linear_slope(t: np.ndarray, logv: np.ndarray) -> float:
    """Least-squares slope of logv against t."""
    tm = t - t.mean()
    denom = float(tm @ tm)
    if denom == 0.0:
        return 0.0
    return float(tm @ (logv - logv.mean())) / denom


def _gauss_newton(residual, jacobian, x0):
    """Damped Gauss-Newton with step halving on the squared residual norm.

    Convergence is declared once the relative parameter step falls below
    STEP_TOL; the iteration then keeps polishing until the step reaches the
    floating-point floor, which is what makes fits exactly scale-consistent.
    Running out of iterations or stalling before STEP_TOL leaves converged
    False. Returns the values needed to assemble a FitResult.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)
    ssr = float(r @ r)
    converged = False
    notes: list[str] = []
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        jac = jacobian(x)
        delta, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        if not np.all(np.isfinite(delta)):
            if not converged:
                notes.append("singular model Jacobian")
            break
        alpha = 1.0
        full_rel = float(np.max(np.abs(delta) / (np.abs(x + delta) + 1e-300)))
        if full_rel < 1e-6:
            # locally convergent region: take the plain step; the squared
            # residual is at its float-noise floor and cannot guide a search
            x_try = x + delta
            r_try = residual(x_try)
            ssr_try = float(r_try @ r_try)
        else:
            improved = False
            for _ in range(40):
                x_try = x + alpha * delta
                r_try = residual(x_try)
                ssr_try = float(r_try @ r_try)
                if np.isfinite(ssr_try) and ssr_try <= ssr:
                    improved = True
                    break
                alpha *= 0.5
            if not improved:
                if not converged:
                    notes.append("line search stalled")
                break
        rel_step = float(np.max(np.abs(alpha * delta) / (np.abs(x_try) + 1e-300)))
        x, r, ssr = x_try, r_try, ssr_try
        if rel_step < STEP_TOL:
            converged = True
        if rel_step < _STEP_FLOOR:
            break
    jac = jacobian(x)
    grad_norm = float(np.max(np.abs(jac.T @ r))) if r.size else 0.0
    return x, r, jac, ssr, converged, iterations, notes


def _uncertainties(jac: np.ndarray, ssr: float, n_params: int) -> tuple[np.ndarray, bool]:
    """One-sigma parameter errors from the linearized residual covariance.

    Directions in which the Jacobian is rank-deficient get infinite
    uncertainty; the second return value flags that case.
    """
    n = jac.shape[0]
    dof = max(n - n_params, 1)
    sigma2 = ssr / dof
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    rank_tol = s[0] * 1e-12 if s.size and s[0] > 0 else 0.0
    deficient = bool(np.any(s <= rank_tol))
    var = np.full(n_params, math.inf)
    good = s > rank_tol
    if np.any(good):
        contrib = (vt[good].T ** 2) / s[good] ** 2  # (params, good dirs)
        var_finite = sigma2 * contrib.sum(axis=1)
        null_weight = (vt[~good].T ** 2).sum(axis=1) if deficient else np.zeros(n_params)
        for i in range(n_params):
            var[i] = math.inf if null_weight[i] > 1e-12 else var_finite[i]
    return np.sqrt(var), deficient


def _result(names, x, r, jac, ssr, converged, iterations, notes) -> FitResult:
    sigmas, deficient = _uncertainties(jac, ssr, len(names))
    if deficient:
        notes = list(notes) + ["some parameters are unidentifiable from this curve"]
    return FitResult(
        parameters={name: float(v) for name, v in zip(names, x)},
        uncertainties={name: float(s) for name, s in zip(names, sigmas)},
        residual_norm=math.sqrt(ssr / r.size),
        converged=converged,
        iterations=iterations,
        gradient_norm=float(np.max(np.abs(jac.T @ r))),
        notes=tuple(notes),
    )


def fit_decay(curve: BuildupCurve) -> FitResult:
    """Fit P(t) = offset + (p0 - offset) exp(-t / t_const).

    Needs at least four samples. A constant curve cannot determine t_const
    and comes back with converged False rather than raising.
    """
    if len(curve) < _MIN_SAMPLES:
        raise ValidationError(f"decay fit needs at least {_MIN_SAMPLES} samples, got {len(curve)}")
    t = curve.times_min
    y = curve.values
    names = ("p0", "t_const", "offset")

    if float(np.ptp(y)) == 0.0:
        c = float(y[0])
        return FitResult(
            parameters={"p0": c, "t_const": math.nan, "offset": c},
            uncertainties={"p0": 0.0, "t_const": math.inf, "offset": 0.0},
            residual_norm=0.0,
            converged=False,
            iterations=0,
            notes=("degenerate curve: constant values leave t_const unidentifiable",),
        )

    p0_init = float(y[0])
    offset_init = float(y[-1])
    span = p0_init - offset_init
    tau_init = (t[-1] - t[0]) / 3.0
    if span != 0.0:
        d = (y - offset_init) / span
        mask = d > 0.05
        if int(mask.sum()) >= 2:
            slope = _log_linear_slope(t[mask], np.log(d[mask]))
            if slope < 0.0:
                tau_init = -1.0 / slope

    def residual(p):
        return p[2] + (p[0] - p[2]) * np.exp(-t / p[1]) - y

    def jacobian(p):
        e = np.exp(-t / p[1])
        return np.column_stack([e, (p[0] - p[2]) * t / p[1] ** 2 * e, 1.0 - e])

    fit = _gauss_newton(residual, jacobian, [p0_init, tau_init, offset_init])
    return _result(names, *fit)


def fit_buildup(curve: BuildupCurve) -> FitResult:
    """Fit P(t) = amplitude * (1 - exp(-rate t)).

    Only the asymptote and the total rate are identifiable from a buildup
    curve alone; the result carries a note saying so. Identically zero data
    converge to zero amplitude with the rate flagged unidentifiable.
    """
    if len(curve) < _MIN_SAMPLES:
        raise ValidationError(f"buildup fit needs at least {_MIN_SAMPLES} samples, got {len(curve)}")
    t = curve.times_min
    y = curve.values
    names = ("amplitude", "rate")
    identifiability = (
        "amplitude and rate are the only combinations identifiable from a buildup curve; "
        "splitting the buildup and relaxation times needs an independent relaxation measurement"
    )

    if float(np.max(np.abs(y))) == 0.0:
        return FitResult(
            parameters={"amplitude": 0.0, "rate": 0.0},
            uncertainties={"amplitude": 0.0, "rate": math.inf},
            residual_norm=0.0,
            converged=True,
            iterations=0,
            notes=("rate unidentifiable: curve amplitude is zero", identifiability),
        )
    if float(np.ptp(y)) == 0.0:
        return FitResult(
            parameters={"amplitude": float(y[0]), "rate": math.nan},
            uncertainties={"amplitude": 0.0, "rate": math.inf},
            residual_norm=0.0,
            converged=False,
            iterations=0,
            notes=("degenerate curve: constant nonzero values", identifiability),
        )

    amp_init = float(y[-1]) if y[-1] != 0.0 else float(np.max(np.abs(y)))
    rate_init = 1.0 / max(t[-1] / 3.0, 1e-12)
    frac = 1.0 - y / amp_init
    mask = (frac > 0.05) & (t > 0.0)
    if int(mask.sum()) >= 2:
        slope = _log_linear_slope(t[mask], np.log(frac[mask]))
        if slope < 0.0:
            rate_init = -slope

    def residual(p):
        return p[0] * (1.0 - np.exp(-p[1] * t)) - y

    def jacobian(p):
        e = np.exp(-p[1] * t)
        return np.column_stack([1.0 - e, p[0] * t * e])

    fit = _gauss_newton(residual, jacobian, [amp_init, rate_init])
    x, r, jac, ssr, converged, iterations, notes = fit
    return _result(names, x, r, jac, ssr, converged, iterations, notes + [identifiability])


def disentangle_buildup(fit: FitResult, tr_minutes: float) -> KineticsParams:
    """Recover td and pe from a buildup fit plus a separately measured tr.

    1/td = rate - 1/tr and pe = amplitude (1 + td/tr). The fitted rate must
    exceed the relaxation rate, otherwise no positive buildup time exists.
    """
    if tr_minutes <= 0.0:
        raise ValidationError(f"tr_minutes must be positive, got {tr_minutes}")
    amplitude = fit.parameters["amplitude"]
    rate = fit.parameters["rate"]
    if not rate > 1.0 / tr_minutes:
        raise InconsistencyError(
            f"fitted rate {rate} per min does not exceed the relaxation rate "
            f"1/tr = {1.0 / tr_minutes} per min; no positive buildup time exists"
        )
    td = 1.0 / (rate - 1.0 / tr_minutes)
    pe = amplitude * (1.0 + td / tr_minutes)
    return KineticsParams(pe=pe, td_minutes=td, tr_minutes=tr_minutes, pth=0.0)


def decompose_relaxation(t1_minutes: float, tr_minutes: float) -> RelaxationDecomposition:
    """Split the laser-on relaxation into lattice and paramagnetic channels.

    te = 1 / (1/tr - 1/t1). Requires t1 > tr > 0: the triplet electrons add
    a relaxation channel, so the combined constant must be the shorter one.
    """
    if tr_minutes <= 0.0:
        raise ValidationError(f"tr_minutes must be positive, got {tr_minutes}")
    if t1_minutes <= tr_minutes:
        raise InconsistencyError(
            f"t1 = {t1_minutes} min must exceed tr = {tr_minutes} min; "
            "no positive paramagnetic time constant exists otherwise"
        )
    te = 1.0 / (1.0 / tr_minutes - 1.0 / t1_minutes)
    return RelaxationDecomposition(t1_minutes=t1_minutes, tr_minutes=tr_minutes, te_minutes=te)


def calibrate_polarization(cal: NmrCalibration) -> float:
    """Absolute polarization from the signal ratio against the reference.

    P = (enhanced / reference) * spin_count_ratio * gain_ratio * reference
    thermal polarization. The sign passes through (an emissive line gives a
    negative polarization); a magnitude above 1 is unphysical and is clamped
    with a warning.
    """
    p = (
        cal.enhanced_signal
        / cal.reference_signal
        * cal.spin_count_ratio
        * cal.gain_ratio
        * cal.reference_thermal_polarization
    )
    if abs(p) > 1.0:
        warnings.warn(
            f"calibrated polarization {p} exceeds unit magnitude; clamping. "
            "Check the signal integrals and correction ratios.",
            stacklevel=2,
        )
        p = math.copysign(1.0, p)
    return p
