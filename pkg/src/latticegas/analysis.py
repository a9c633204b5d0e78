"""Estimators and fits on simulation records.

Exponential relaxation fits with an offset, per-axis temperature
estimators, the conserved-combination drift check and the peak phase
space density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .constants import CS, Constants
from .core import temperature_from_mean_n
from .errors import ConfigError, FitConvergenceError


@dataclass
class TimeSeries:
    """Sampled record: strictly increasing times plus named columns."""

    t: np.ndarray
    columns: dict
    units: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.ndim != 1 or len(self.t) == 0:
            raise ConfigError("time axis must be a non-empty 1D array")
        if np.any(np.diff(self.t) <= 0):
            raise ConfigError("time axis must be strictly increasing")
        for name, col in self.columns.items():
            arr = np.asarray(col, dtype=float)
            if arr.shape != self.t.shape:
                raise ConfigError(f"column {name!r} length differs from time axis")
            self.columns[name] = arr

    def __getitem__(self, name):
        return self.columns[name]


@dataclass(frozen=True)
class FitResult:
    """Offset-exponential fit A + B exp(-t/tau)."""

    tau: float
    amplitude: float
    offset: float
    covariance_diag: tuple
    residual_rms: float
    degenerate: bool = False


def fit_exponential(ts: TimeSeries, column: str) -> FitResult:
    """Least-squares fit of A + B exp(-t/tau) to one column.

    Needs at least 8 points spanning roughly one expected 1/e time. A flat
    series (no resolvable amplitude, or tau consistent with zero) is
    returned with the degenerate flag instead of an error.
    """
    y = ts[column]
    t = ts.t
    if len(t) < 8:
        raise ConfigError("need at least 8 samples for the exponential fit")
    span = t[-1] - t[0]
    y0, y1 = y[0], y[-1]
    scale = float(np.std(y))
    if scale == 0.0 or abs(y0 - y1) < 1e-12 * (abs(y0) + abs(y1) + 1e-300):
        return FitResult(
            tau=span, amplitude=0.0, offset=float(np.mean(y)),
            covariance_diag=(np.inf, np.inf, np.inf),
            residual_rms=float(np.std(y)), degenerate=True,
        )

    def model(tt, a, b, tau):
        return a + b * np.exp(-tt / tau)

    p0 = (float(y1), float(y0 - y1), span / 3.0)
    try:
        popt, pcov = curve_fit(
            model, t - t[0], y, p0=p0,
            bounds=([-np.inf, -np.inf, span * 1e-6], [np.inf, np.inf, span * 1e3]),
            maxfev=20000,
        )
    except RuntimeError as err:
        resid = y - model(t - t[0], *p0)
        raise FitConvergenceError(f"exponential fit failed: {err}", residuals=resid)
    resid = y - model(t - t[0], *popt)
    rms = float(np.sqrt(np.mean(resid**2)))
    diag = tuple(float(x) for x in np.diag(pcov))
    tau = float(popt[2])
    tau_err = math.sqrt(diag[2]) if np.isfinite(diag[2]) else np.inf
    degenerate = bool(tau <= 2 * tau_err and tau_err != np.inf and tau_err > 0.5 * tau) or abs(
        popt[1]
    ) < 2 * rms
    return FitResult(
        tau=tau, amplitude=float(popt[1]), offset=float(popt[0]),
        covariance_diag=diag, residual_rms=rms, degenerate=degenerate,
    )


def kinetic_invariant(ts: TimeSeries, x_col: str = "vx_rms", z_col: str = "vz_rms") -> float:
    """Peak relative drift of 2 <v_x^2> + <v_z^2> over the record.

    With the horizontal motion isotropic this combination tracks the total
    kinetic energy per particle, so collisions should leave it flat.
    """
    q = 2 * ts[x_col] ** 2 + ts[z_col] ** 2
    if q[0] == 0:
        raise ConfigError("invariant undefined for an initially zero record")
    return float(np.max(np.abs(q - q[0])) / q[0])


def phase_space_density(n_peak: float, T: float, c: Constants = CS) -> float:
    """Peak phase-space density n lambda_dB^3, lambda_dB = hbar sqrt(2 pi / m k T)."""
    if n_peak <= 0 or T <= 0:
        raise ConfigError("inputs must be positive")
    lam = c.hbar * math.sqrt(2 * math.pi / (c.m_Cs * c.k_B * T))
    return n_peak * lam**3


@dataclass(frozen=True)
class TemperatureEstimate:
    T: float        # K
    stderr: float   # K


def temperature_estimators(state, c: Constants = CS):
    """Per-axis kinetic temperatures k_B T_i = m <v_i^2> with standard errors.

    In quantized-axial mode the z entry inverts the Boltzmann ladder from
    the mean axial quantum number instead.
    """
    N = len(state)
    if N < 100:
        raise ConfigError("need >= 100 particles for a meaningful estimate")
    m = c.m_Cs
    out = {}
    for axis, name in enumerate(("x", "y", "z")):
        if getattr(state, "mode", "classical3d") == "quantized_axial" and name == "z":
            nbar = float(np.mean(state.axial_n))
            t_est = temperature_from_mean_n(nbar, state.trap.omega_osc, c)
            nerr = float(np.std(state.axial_n)) / math.sqrt(N)
            if nbar > 0:
                dT = abs(
                    temperature_from_mean_n(nbar + nerr, state.trap.omega_osc, c) - t_est
                )
            else:
                dT = 0.0
            out[name] = TemperatureEstimate(T=t_est, stderr=dT)
            continue
        v2 = state.velocities[:, axis] ** 2
        t_est = m * float(np.mean(v2)) / c.k_B
        stderr = m * float(np.std(v2)) / math.sqrt(N) / c.k_B
        out[name] = TemperatureEstimate(T=t_est, stderr=stderr)
    return out
