"""Trap model and single-atom derived quantities.

Covers the crossed-beam intensity lattice: Lamb-Dicke parameter, ground
state size, the polarization-induced Raman coupling between Zeeman
levels, frequency rescaling when the polarization angle changes, thermal
occupation helpers and the trap-depth scaling of light-assisted losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import CS, Constants
from .errors import ConfigError, DegenerateLatticeError, UnsupportedPolarizationError

#: Parity labels for the Raman coupling under the two polarization phases.
PARITY_ODD = "odd"
PARITY_EVEN = "even"
PARITY_MIXED = "mixed"


@dataclass(frozen=True)
class TrapConfig:
    """Geometry and polarization state of the crossed-beam lattice trap.

    Angular frequencies in rad/s, angles in rad, depth in J. ``alpha`` is
    the angle of the movable beam's linear polarization with the
    horizontal; ``pol_phase`` the relative phase between its two
    polarization components (0 = linear, pi/2 = most elliptical).
    """

    omega_osc: float          # vertical (lattice) oscillation frequency
    omega_x: float
    omega_y: float
    depth_U0: float           # lattice depth at linear polarizations
    theta_YAG: float = math.radians(52.0)
    lattice_period: float = 665e-9
    alpha: float = 0.0
    pol_phase: float = 0.0
    delta_1: float = 0.0      # signed detuning from D1 (red < 0)
    delta_2: float = 0.0      # signed detuning from D2 (red < 0)

    def __post_init__(self):
        if self.omega_osc <= 0 or self.omega_x <= 0 or self.omega_y <= 0:
            raise ConfigError("trap frequencies must be strictly positive")
        if self.lattice_period <= 0:
            raise ConfigError("lattice_period must be positive")
        if self.depth_U0 <= 0:
            raise ConfigError("depth_U0 must be positive")
        if self.omega_osc <= 10 * max(self.omega_x, self.omega_y):
            raise ConfigError(
                "omega_osc must dominate the horizontal frequencies "
                f"(ratio {self.omega_osc / max(self.omega_x, self.omega_y):.2f} <= 10)"
            )
        if not 0.0 <= self.alpha <= math.pi / 2:
            raise ConfigError("alpha must lie in [0, pi/2]")
        if not 0.0 <= self.pol_phase <= math.pi:
            raise ConfigError("pol_phase must lie in [0, pi]")

    @classmethod
    def paper_trap(cls, c: Constants = CS, alpha: float = math.radians(20.0)) -> "TrapConfig":
        """Central micro-trap of the crossed 1064 nm beams at 52 degrees.

        80 kHz vertical, 175/140 Hz horizontal, 140 uK deep, 665 nm period.
        """
        omega_yag = 2 * np.pi * 299792458.0 / c.lambda_YAG
        omega_d1 = 2 * np.pi * 299792458.0 / c.lambda_D1
        omega_d2 = 2 * np.pi * 299792458.0 / c.lambda_D2
        return cls(
            omega_osc=2 * np.pi * 80e3,
            omega_x=2 * np.pi * 175.0,
            omega_y=2 * np.pi * 140.0,
            depth_U0=c.k_B * 140e-6,
            theta_YAG=math.radians(52.0),
            lattice_period=665e-9,
            alpha=alpha,
            pol_phase=0.0,
            delta_1=omega_yag - omega_d1,
            delta_2=omega_yag - omega_d2,
        )


@dataclass(frozen=True)
class ThermalState:
    """Boltzmann occupation of one harmonic ladder at temperature T."""

    T: float                 # K
    mean_n: float            # mean vibrational quantum number
    ground_fraction: float   # population of n = 0

    def __post_init__(self):
        if not 0.0 <= self.ground_fraction <= 1.0:
            raise ConfigError("ground_fraction must lie in [0, 1]")


def lamb_dicke(trap: TrapConfig, c: Constants = CS) -> float:
    """Lamb-Dicke parameter sqrt(omega_recoil / omega_osc) for the D2 line."""
    if trap.omega_osc <= 0:
        raise ConfigError("omega_osc must be positive")
    return math.sqrt(c.omega_recoil / trap.omega_osc)


def ground_state_size(omega_osc: float, c: Constants = CS) -> float:
    """rms size sqrt(hbar / 2 m omega) of the harmonic ground state (m)."""
    if omega_osc <= 0:
        raise ConfigError("omega_osc must be positive")
    return math.sqrt(c.hbar / (2 * c.m_Cs * omega_osc))


def detuning_factor(trap: TrapConfig) -> float:
    """Dimensionless fine-structure factor Delta_YAG (1/Delta_1 - 1/Delta_2)."""
    if trap.delta_1 == 0 or trap.delta_2 == 0:
        raise ConfigError("detunings must be set (signed, red < 0)")
    delta_yag = trap.delta_1 / 3 + 2 * trap.delta_2 / 3
    return delta_yag * (1 / trap.delta_1 - 1 / trap.delta_2)


def raman_coupling(trap: TrapConfig, c: Constants = CS, n: int = 1) -> float:
    """Zeeman-changing coupling V for the first red sideband from level n (J).

    V = (sqrt(6)/24) eta U0 Delta_YAG (1/Delta_1 - 1/Delta_2)
        sin(alpha) sin(theta_YAG) sqrt(n),
    keeping only the term of first order in the Lamb-Dicke parameter.
    Requires linear polarization of the movable beam; returns 0 for n = 0
    where the first sideband is forbidden.
    """
    if trap.pol_phase != 0.0:
        raise UnsupportedPolarizationError(
            "first-sideband coupling formula holds for linear polarization only "
            "(pol_phase = 0); see coupling_parity for the selection rules"
        )
    if n < 0:
        raise ConfigError("vibrational level n must be >= 0")
    if n == 0:
        return 0.0
    eta = lamb_dicke(trap, c)
    v_r = (
        math.sqrt(6) / 24
        * eta
        * trap.depth_U0
        * detuning_factor(trap)
        * math.sin(trap.alpha)
        * math.sin(trap.theta_YAG)
    )
    return v_r * math.sqrt(n)


def rabi_frequency(trap: TrapConfig, c: Constants = CS, n: int = 1) -> float:
    """Rabi angular frequency 2 V_R sqrt(n) / hbar of the n -> n-1 transfer."""
    return 2 * raman_coupling(trap, c, n) / c.hbar


def coupling_parity(pol_phase: float):
    """Spatial parity of the Raman coupling for a given polarization phase.

    Returns ("odd", weights) for linear polarization (Delta n = +-1
    allowed), ("even", weights) for phase pi/2 (Delta n in {0, +-2}), and
    ("mixed", {odd: cos^2, even: sin^2}) in between.
    """
    if not 0.0 <= pol_phase <= math.pi:
        raise ConfigError("pol_phase must lie in [0, pi]")
    w_even = math.sin(pol_phase) ** 2
    w_odd = math.cos(pol_phase) ** 2
    if pol_phase == 0.0 or pol_phase == math.pi:
        return PARITY_ODD, {PARITY_ODD: 1.0, PARITY_EVEN: 0.0}
    if pol_phase == math.pi / 2:
        return PARITY_EVEN, {PARITY_ODD: 0.0, PARITY_EVEN: 1.0}
    return PARITY_MIXED, {PARITY_ODD: w_odd, PARITY_EVEN: w_even}


def allowed_delta_n(parity: str) -> tuple:
    """Vibrational-level changes permitted by the coupling parity."""
    if parity == PARITY_ODD:
        return (-1, 1)
    if parity == PARITY_EVEN:
        return (-2, 0, 2)
    raise ConfigError(f"no selection rule for parity {parity!r}")


def rescale_frequencies(trap: TrapConfig, alpha_new: float) -> TrapConfig:
    """Trap after rotating the movable-beam polarization to ``alpha_new``.

    The lattice contrast scales the vertical frequency by
    sqrt(cos(alpha_new)/cos(alpha_old)); depth and horizontal frequencies
    follow the weaker (1 + cos alpha)/2 envelope.
    """
    if not 0.0 <= alpha_new < math.pi / 2:
        raise DegenerateLatticeError(
            "alpha = pi/2 removes the interference contrast entirely"
        )
    if math.cos(trap.alpha) <= 0.0:
        raise DegenerateLatticeError("stored trap already has zero contrast")
    fz = math.sqrt(math.cos(alpha_new) / math.cos(trap.alpha))
    fh = math.sqrt((1 + math.cos(alpha_new)) / (1 + math.cos(trap.alpha)))
    return replace(
        trap,
        omega_osc=trap.omega_osc * fz,
        omega_x=trap.omega_x * fh,
        omega_y=trap.omega_y * fh,
        depth_U0=trap.depth_U0 * (1 + math.cos(alpha_new)) / (1 + math.cos(trap.alpha)),
        alpha=alpha_new,
    )


def two_step_final_temperature(beta: float, trap1: TrapConfig, trap2: TrapConfig) -> float:
    """Reduced temperature k_B T_h / (hbar omega_z1) after the two-step cycle.

    Cooling at the rotated trap (trap2) reaches k_B T_h = beta hbar
    omega_z2; the adiabatic return to trap1 rescales the horizontal energy
    by the frequency ratio, giving beta (omega_x1/omega_x2)(omega_z2/omega_z1).
    """
    if beta <= 0:
        raise ConfigError("beta must be positive")
    return beta * (trap1.omega_x / trap2.omega_x) * (trap2.omega_osc / trap1.omega_osc)


def thermal_state(T: float, omega: float, c: Constants = CS) -> ThermalState:
    """Boltzmann ladder occupation at temperature T for spacing hbar omega."""
    if omega <= 0:
        raise ConfigError("omega must be positive")
    if T < 0:
        raise ConfigError("temperature must be >= 0")
    if T == 0.0:
        return ThermalState(T=0.0, mean_n=0.0, ground_fraction=1.0)
    x = c.hbar * omega / (c.k_B * T)
    mean_n = 1.0 / math.expm1(x)
    ground_fraction = -math.expm1(-x)
    return ThermalState(T=T, mean_n=mean_n, ground_fraction=ground_fraction)


def temperature_from_ground_fraction(p0: float, omega: float, c: Constants = CS) -> float:
    """Invert p0 = 1 - exp(-hbar omega / k_B T); p0 = 1 maps to T = 0."""
    if not 0.0 < p0 <= 1.0:
        raise ConfigError("ground fraction must lie in (0, 1]")
    if omega <= 0:
        raise ConfigError("omega must be positive")
    if p0 == 1.0:
        return 0.0
    x = -math.log1p(-p0)
    return c.hbar * omega / (c.k_B * x)


def temperature_from_mean_n(mean_n: float, omega: float, c: Constants = CS) -> float:
    """Temperature of a Boltzmann ladder with the given mean occupation."""
    if mean_n < 0:
        raise ConfigError("mean_n must be >= 0")
    if omega <= 0:
        raise ConfigError("omega must be positive")
    if mean_n == 0.0:
        return 0.0
    return c.hbar * omega / (c.k_B * math.log(1 + 1 / mean_n))


def loss_rate_scaling(U_ref: float, K_ref: float, U_new: float) -> float:
    """Radiative-escape loss coefficient scaled as K proportional to U^(5/6).

    Returns K_ref (U_new/U_ref)^(5/6). Note: the source estimate quotes a
    larger K for a shallower trap, i.e. applies this power law inversely;
    the stated direction of the law is kept here and the inversion is left
    to the caller.
    """
    if U_ref <= 0 or U_new <= 0:
        raise ConfigError("trap depths must be positive")
    return K_ref * (U_new / U_ref) ** (5.0 / 6.0)
