"""Physical constants for cesium in a far-detuned 1064 nm lattice.

CODATA values via scipy; cesium D-line wavelengths from the standard
atomic data tables. All quantities SI.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar as _HBAR, k as _KB, atomic_mass as _AMU

# Cs-133 atomic mass (CODATA relative mass times the atomic mass constant).
M_CS = 132.905451961 * _AMU  # kg

# Optical wavelengths (vacuum).
LAMBDA_D2 = 852.34727582e-9  # m
LAMBDA_D1 = 894.59295986e-9  # m
LAMBDA_YAG = 1064.0e-9       # m

C_LIGHT = 299792458.0        # m/s


@dataclass(frozen=True)
class Constants:
    """Bundle of the constants every formula in the package draws on."""

    hbar: float = _HBAR          # J s
    k_B: float = _KB             # J/K
    m_Cs: float = M_CS           # kg
    lambda_D2: float = LAMBDA_D2  # m
    lambda_D1: float = LAMBDA_D1  # m
    lambda_YAG: float = LAMBDA_YAG  # m

    def __post_init__(self):
        for name in ("hbar", "k_B", "m_Cs", "lambda_D2", "lambda_D1", "lambda_YAG"):
            if getattr(self, name) <= 0:
                raise ValueError(f"constant {name} must be strictly positive")
        # Recoil frequency sanity: for cesium on the D2 line this sits near
        # 2 pi x 2.07 kHz, well below 2 pi x 3 kHz.
        if not self.omega_recoil < 2 * np.pi * 3e3:
            raise ValueError("D2 recoil frequency out of range for cesium")

    @property
    def k_D2(self) -> float:
        """D2 wavevector (rad/m)."""
        return 2 * np.pi / self.lambda_D2

    @property
    def omega_recoil(self) -> float:
        """Recoil angular frequency hbar k^2 / 2m for the D2 line (rad/s)."""
        return self.hbar * self.k_D2**2 / (2 * self.m_Cs)

    @property
    def recoil_energy(self) -> float:
        """Single-photon recoil energy on the D2 line (J)."""
        return self.hbar * self.omega_recoil


#: Shared default instance; all constants are immutable.
CS = Constants()
