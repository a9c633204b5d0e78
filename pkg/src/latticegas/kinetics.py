"""Closed-form collision kinetics at the zero-energy scattering resonance.

Unitarity-limited s-wave cross section, the classical cross-dimensional
thermalization time for a harmonically trapped gas, the quasi-2D
freeze-out formulas, and mean densities over the lattice micro-planes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import CS, Constants
from .core import TrapConfig
from .errors import ConfigError, ZeroRelativeVelocityError


def wavevector_relative(v_rel: float, c: Constants = CS) -> float:
    """Wavevector |v_rel| m / (2 hbar) of the relative motion (rad/m)."""
    return abs(v_rel) * c.m_Cs / (2 * c.hbar)


def cross_section(v_rel: float, c: Constants = CS) -> float:
    """Unitarity-limited s-wave cross section 8 pi / k^2 (m^2).

    Diverges at zero relative velocity; that case raises so that callers
    relying on the closed form cannot silently absorb an infinite rate.
    The DSMC engine caps the divergence via its majorant instead.
    """
    if v_rel == 0.0:
        raise ZeroRelativeVelocityError("cross section diverges at v_rel = 0")
    k = wavevector_relative(v_rel, c)
    return 8 * np.pi / k**2


def cross_section_capped(v_rel, k_min: float, c: Constants = CS):
    """Cross section with sigma held at 8 pi / k_min^2 below k_min.

    Vectorized; k_min is the smallest classically resolvable relative
    wavevector (set by the axial ground-state momentum spread).
    """
    v = np.asarray(v_rel, dtype=float)
    k = np.maximum(v * c.m_Cs / (2 * c.hbar), k_min)
    return 8 * np.pi / k**2


def analytic_t_therm_classical(n_bar: float, T0: float, c: Constants = CS):
    """Classical cross-dimensional 1/e thermalization time and observable.

    For small anisotropy the relaxation of T_z - T_rho is exponential with

        1 / (n_bar v_rms T_therm) = (2 / 15 sqrt(pi)) sigma(v_rms)
                                  = (64 sqrt(pi) / 15) hbar^2 / (m k_B T0),

    v_rms = sqrt(k_B T0 / m). Returns (T_therm, observable).
    """
    if n_bar <= 0 or T0 <= 0:
        raise ConfigError("density and temperature must be positive")
    observable = 64 * math.sqrt(math.pi) / 15 * c.hbar**2 / (c.m_Cs * c.k_B * T0)
    v_rms = math.sqrt(c.k_B * T0 / c.m_Cs)
    t_therm = 1.0 / (n_bar * v_rms * observable)
    return t_therm, observable


def analytic_t_therm_quasi2d(n_2d: float, T: float, omega_osc: float, c: Constants = CS) -> float:
    """Quasi-2D thermalization time (9m / 64 hbar) e^(hbar omega / k T) / n_2d.

    Valid for k_B T below about hbar omega_osc; warns outside that range.
    """
    if n_2d <= 0 or T <= 0 or omega_osc <= 0:
        raise ConfigError("inputs must be positive")
    x = c.hbar * omega_osc / (c.k_B * T)
    if x < 1.0:
        warnings.warn(
            "quasi-2D formula used outside its k_B T <~ hbar omega domain",
            stacklevel=2,
        )
    return 9 * c.m_Cs / (64 * c.hbar) / n_2d * math.exp(x)


def suppression_factor(T: float, omega_osc: float, c: Constants = CS) -> float:
    """Fraction e^(-2 hbar omega / k_B T) of pairs able to excite the axial motion."""
    if T <= 0 or omega_osc <= 0:
        raise ConfigError("inputs must be positive")
    return math.exp(-2 * c.hbar * omega_osc / (c.k_B * T))


def collision_rate_2d(n_2d: float, c: Constants = CS) -> float:
    """Quasi-2D elastic collision rate estimate hbar n_2d / m (1/s)."""
    if n_2d <= 0:
        raise ConfigError("n_2d must be positive")
    return c.hbar * n_2d / c.m_Cs


def energy_distribution_2d(E, T: float, c: Constants = CS):
    """Probability density (1/k_B T) e^(-E/k_B T) of the relative 2D kinetic energy.

    The 2D density of states is constant, so the distribution is a pure
    exponential. Vectorized in E; zero for E < 0.
    """
    if T <= 0:
        raise ConfigError("temperature must be positive")
    e = np.asarray(E, dtype=float)
    kt = c.k_B * T
    return np.where(e >= 0, np.exp(-np.clip(e, 0, None) / kt) / kt, 0.0)


def dEz_dt(n_2d: float, T: float, omega_osc: float, c: Constants = CS) -> float:
    """Axial heating rate 2 hbar omega (hbar n_2d / m) e^(-2 hbar omega / kT) (W)."""
    return (
        2 * c.hbar * omega_osc
        * collision_rate_2d(n_2d, c)
        * suppression_factor(T, omega_osc, c)
    )


def delta_Ez(T: float, omega_osc: float, c: Constants = CS) -> float:
    """Axial energy deficit hbar omega e^(-hbar omega / k_B T) at equilibrium (J)."""
    if T <= 0 or omega_osc <= 0:
        raise ConfigError("inputs must be positive")
    x = c.hbar * omega_osc / (c.k_B * T)
    return c.hbar * omega_osc * math.exp(-x)


@dataclass(frozen=True)
class MeanDensityResult:
    """Population-weighted densities over the occupied lattice planes."""

    n_bar_3d: float          # mean 3D density seen by an atom, m^-3
    n_bar_2d: float          # population-weighted mean of per-plane mean 2D density, m^-2
    n_peak_2d: float         # peak 2D density of the most populated plane, m^-2
    occupied_planes: float   # effective number of populated micro-planes
    plane_populations: np.ndarray


def axial_width(T: float, omega_osc: float, c: Constants = CS) -> float:
    """rms axial width sqrt(<z^2>) of one plane at temperature T (m).

    Uses the quantum harmonic result (hbar/2 m omega) coth(hbar omega/2 kT),
    reducing to the ground-state size at T -> 0 and the classical width at
    high T.
    """
    l0_sq = c.hbar / (2 * c.m_Cs * omega_osc)
    if T <= 0:
        return math.sqrt(l0_sq)
    x = c.hbar * omega_osc / (2 * c.k_B * T)
    return math.sqrt(l0_sq / math.tanh(x))


def mean_density(
    sigma_x: float,
    sigma_y: float,
    sigma_z: float,
    N: float,
    trap: TrapConfig,
    T: float,
    c: Constants = CS,
) -> MeanDensityResult:
    """Distribute N atoms over lattice planes and average the density an atom sees.

    The vertical Gaussian profile (rms sigma_z) is discretized at the
    lattice period; each plane holds a 2D thermal cloud set by T and the
    horizontal frequencies, with axial extent from ``axial_width``. The
    mean density seen by an atom is the population-weighted average of the
    per-plane means, n_bar_i = N_i / (4 pi s_x s_y) / (2 sqrt(pi) l_z).
    """
    if N <= 0:
        raise ConfigError("N must be positive")
    if min(sigma_x, sigma_y, sigma_z) <= 0:
        raise ConfigError("cloud sizes must be positive")
    d = trap.lattice_period
    half = int(math.ceil(6 * sigma_z / d))
    z = d * np.arange(-half, half + 1)
    weights = np.exp(-(z**2) / (2 * sigma_z**2))
    weights /= weights.sum()
    pops = N * weights

    # Per-plane horizontal thermal sizes; independent of the plane.
    s_x = math.sqrt(c.k_B * T / c.m_Cs) / trap.omega_x
    s_y = math.sqrt(c.k_B * T / c.m_Cs) / trap.omega_y
    l_z = axial_width(T, trap.omega_osc, c)

    n2d_mean_per_plane = pops / (4 * np.pi * s_x * s_y)
    n3d_per_plane = n2d_mean_per_plane / (2 * math.sqrt(math.pi) * l_z)

    # Population-weighted means (what a randomly chosen atom experiences).
    frac = pops / N
    n_bar_2d = float(np.sum(frac * n2d_mean_per_plane))
    n_bar_3d = float(np.sum(frac * n3d_per_plane))
    n_peak_2d = float(pops.max() / (2 * np.pi * s_x * s_y))
    occupied = float(N / pops.max())
    return MeanDensityResult(
        n_bar_3d=n_bar_3d,
        n_bar_2d=n_bar_2d,
        n_peak_2d=n_peak_2d,
        occupied_planes=occupied,
        plane_populations=pops,
    )
