"""Rate-equation engine for degenerate-Raman sideband cooling.

The model lives on the vibrational ladder of the stretched Zeeman state:
Raman transfer to the short-lived neighbor level followed by optical
repumping is treated as one incoherent rate, with repumping instantaneous
and level-preserving. Off-resonant channels are reduced by a Lorentzian
in the transition mismatch, which reproduces both the resonant and the
strongly detuned steady-state limits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, null_space
from scipy.optimize import curve_fit

from .constants import CS, Constants
from .core import PARITY_EVEN, PARITY_ODD, temperature_from_mean_n
from .errors import ConfigError, SteadyStateAmbiguousError

_LEAK_TOL = 1e-6


@dataclass(frozen=True)
class RateModelConfig:
    """Inputs of the sideband-cooling rate model (angular frequencies, rad/s)."""

    omega_osc: float
    Omega_R: float               # Rabi frequency of the n = 1 first red sideband
    Gamma_prime: float           # width of the repumped Zeeman level
    zeeman_splitting: float = 0.0  # 0 means: tuned to the first red sideband
    detuning_delta: float = 0.0    # per-atom offset of omega_osc from resonance
    sigma_minus_fraction: float = 0.0
    parity: str = PARITY_ODD
    n_max: int = 40
    eta: float = 0.16

    def __post_init__(self):
        if self.omega_osc <= 0 or self.Gamma_prime <= 0 or self.Omega_R < 0:
            raise ConfigError("frequencies must be positive")
        if not 0.0 <= self.sigma_minus_fraction < 1.0:
            raise ConfigError("sigma_minus_fraction must lie in [0, 1)")
        if self.parity not in (PARITY_ODD, PARITY_EVEN):
            raise ConfigError("parity must be 'odd' or 'even'")
        if self.n_max < 10:
            raise ConfigError("n_max must be at least 10")
        if not (self.Omega_R < self.Gamma_prime < self.omega_osc):
            warnings.warn(
                "resolved-sideband hierarchy Omega_R < Gamma' < omega_osc not met; "
                "rate model is outside its best regime",
                stacklevel=2,
            )

    @property
    def zeeman(self) -> float:
        """Zeeman splitting; defaults to the first-sideband resonance."""
        return self.zeeman_splitting if self.zeeman_splitting > 0 else self.omega_osc


@dataclass
class PopulationVector:
    """Occupations p[m][n] for m in {2, 3}; repumping keeps m = 2 empty."""

    p3: np.ndarray
    p2: np.ndarray = None

    def __post_init__(self):
        self.p3 = np.asarray(self.p3, dtype=float)
        if self.p2 is None:
            self.p2 = np.zeros_like(self.p3)
        self.p2 = np.asarray(self.p2, dtype=float)
        if self.p2.shape != self.p3.shape:
            raise ConfigError("m=2 and m=3 ladders must have equal length")
        total = float(self.p3.sum() + self.p2.sum())
        if np.any(self.p3 < -1e-12) or np.any(self.p2 < -1e-12):
            raise ConfigError("occupations must be non-negative")
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"occupations must sum to 1 (got {total!r})")

    def __getitem__(self, m: int) -> np.ndarray:
        if m == 3:
            return self.p3
        if m == 2:
            return self.p2
        raise KeyError(m)

    @property
    def mean_n(self) -> float:
        n = np.arange(len(self.p3))
        return float(np.dot(n, self.p3) + np.dot(n, self.p2))

    @classmethod
    def thermal(cls, mean_n: float, n_max: int) -> "PopulationVector":
        """Truncated, renormalized Boltzmann ladder with the given mean."""
        if mean_n < 0:
            raise ConfigError("mean_n must be >= 0")
        n = np.arange(n_max + 1)
        if mean_n == 0:
            p = np.zeros(n_max + 1)
            p[0] = 1.0
        else:
            s = mean_n / (1.0 + mean_n)
            p = (1 - s) * s**n
            p /= p.sum()
        return cls(p3=p)

    @classmethod
    def ground(cls, n_max: int) -> "PopulationVector":
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return cls(p3=p)


def _lorentzian(gamma: float, mismatch: float) -> float:
    return gamma**2 / (gamma**2 + 4 * mismatch**2)


def build_rate_matrix(cfg: RateModelConfig) -> np.ndarray:
    """Generator matrix Q over the stretched-state ladder (columns sum to 0).

    Raman-plus-repump channels: rate = Omega_R^2 g / Gamma' times the
    Lorentzian reduction in the transition mismatch, where g carries the
    level dependence of the coupling (n for the first sideband,
    (eta/2)^2 n(n-1) for the second). The mismatch of an n -> n + dn
    transfer for an atom oscillating at omega_osc + delta is
    (-dn)(omega_osc + delta) - zeeman_splitting. A sigma-polarized
    repumper component excites the stretched state at a rate
    sigma_minus_fraction * Gamma', shuffling n by +-1 with probability
    eta^2 per event.
    """
    size = cfg.n_max + 1
    q = np.zeros((size, size))
    gp = cfg.Gamma_prime
    omega_atom = cfg.omega_osc + cfg.detuning_delta
    zeeman = cfg.zeeman
    base = cfg.Omega_R**2 / gp
    n = np.arange(size, dtype=float)

    if cfg.parity == PARITY_ODD:
        channels = ((-1, n), (1, n + 1))
    else:
        fac = (cfg.eta / 2.0) ** 2
        channels = ((-2, fac * n * (n - 1)), (2, fac * (n + 1) * (n + 2)))

    for dn, g in channels:
        mismatch = -dn * omega_atom - zeeman
        rate_n = base * g * _lorentzian(gp, mismatch)
        for i in range(size):
            j = i + dn
            if 0 <= j < size and rate_n[i] > 0:
                q[j, i] += rate_n[i]
                q[i, i] -= rate_n[i]

    if cfg.sigma_minus_fraction > 0:
        recoil = cfg.sigma_minus_fraction * gp * cfg.eta**2
        for i in range(size):
            for j in (i - 1, i + 1):
                if 0 <= j < size:
                    q[j, i] += recoil
                    q[i, i] -= recoil
    return q


def steady_state(matrix: np.ndarray) -> PopulationVector:
    """Unique normalized stationary distribution of the rate matrix."""
    q = np.asarray(matrix, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ConfigError("rate matrix must be square")
    colsums = np.abs(q.sum(axis=0))
    scale = max(float(np.max(np.abs(q))), 1.0)
    if np.max(colsums) > 1e-9 * scale:
        raise ConfigError("rate-matrix columns must sum to zero (conservation)")
    ns = null_space(q, rcond=1e-12)
    if ns.shape[1] == 0:
        raise SteadyStateAmbiguousError("no stationary distribution found")
    if ns.shape[1] > 1:
        raise SteadyStateAmbiguousError(
            f"{ns.shape[1]} independent stationary states: matrix is reducible"
        )
    p = ns[:, 0]
    if p.sum() < 0:
        p = -p
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if total <= 0:
        raise SteadyStateAmbiguousError("degenerate null vector")
    p /= total
    residual = float(np.max(np.abs(q @ p)))
    if residual > 1e-10 * scale:
        raise SteadyStateAmbiguousError(f"stationary residual too large: {residual}")
    if p[-1] > _LEAK_TOL:
        warnings.warn(
            f"steady-state occupation {p[-1]:.2e} at the truncation level; "
            "increase n_max",
            stacklevel=2,
        )
    return PopulationVector(p3=p)


def cooling_rate(cfg: RateModelConfig, c: Constants = CS) -> float:
    """Closed-form cooling rate Omega_R^2/Gamma', Lorentzian-reduced off resonance."""
    rate = cfg.Omega_R**2 / cfg.Gamma_prime
    return rate * _lorentzian(cfg.Gamma_prime, cfg.detuning_delta)


def lorentzian_reduction_factor(cfg: RateModelConfig) -> float:
    """Factor by which the detuning slows the cooling: (G'^2 + 4 d^2)/G'^2."""
    return 1.0 / _lorentzian(cfg.Gamma_prime, cfg.detuning_delta)


def evolve(matrix: np.ndarray, p0: PopulationVector, t_grid) -> np.ndarray:
    """Propagate dp/dt = Q p on the given time grid.

    Uses the exact exponential propagator per interval (cached by step
    length), so probability is conserved to machine precision. Returns an
    array of shape (len(t_grid), n_max + 1).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) == 0 or np.any(np.diff(t) <= 0):
        raise ConfigError("t_grid must be 1D and strictly increasing")
    q = np.asarray(matrix, dtype=float)
    p = p0.p3.astype(float).copy()
    if len(p) != q.shape[0]:
        raise ConfigError("population vector does not match the matrix size")
    out = np.empty((len(t), len(p)))
    propagators = {}
    t_prev = 0.0
    for i, ti in enumerate(t):
        dt = ti - t_prev
        if dt > 0:
            key = round(dt, 15)
            if key not in propagators:
                propagators[key] = expm(q * dt)
            p = propagators[key] @ p
        total = p.sum()
        if abs(total - 1.0) > 1e-8:
            raise ConfigError(f"probability drifted to {total!r} during evolution")
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        out[i] = p
        t_prev = ti
    return out


def trajectory_records(matrix, p0: PopulationVector, t_grid, cfg: RateModelConfig,
                       c: Constants = CS):
    """Columnar record (t, p3_0..p3_nmax, mean_n, kT/hbar omega) of one evolution."""
    from .analysis import TimeSeries

    traj = evolve(matrix, p0, t_grid)
    n = np.arange(traj.shape[1])
    mean_n = traj @ n
    kt_over = np.array([
        c.k_B * temperature_from_mean_n(mn, cfg.omega_osc, c) / (c.hbar * cfg.omega_osc)
        if mn > 0 else 0.0
        for mn in mean_n
    ])
    cols = {f"p3_{i}": traj[:, i] for i in range(traj.shape[1])}
    cols["mean_n"] = mean_n
    cols["kT_over_hw"] = kt_over
    units = {k: "1" for k in cols}
    return TimeSeries(t=np.asarray(t_grid, dtype=float), columns=cols, units=units)


def thermal_rabi_signal(Omega_R: float, T: float, omega_osc: float, t_grid,
                        c: Constants = CS) -> np.ndarray:
    """Thermally averaged survival after Raman coupling to the level below.

    S(t) = sum_n P(n) cos^2(sqrt(n) Omega_R t / 2): the ground level is
    dark and each occupied level oscillates at its own sqrt(n) Rabi
    frequency, so the average dephases toward a plateau.
    """
    t = np.asarray(t_grid, dtype=float)
    if Omega_R < 0 or omega_osc <= 0 or T < 0:
        raise ConfigError("invalid signal parameters")
    if T == 0.0:
        return np.ones_like(t)
    s = math.exp(-c.hbar * omega_osc / (c.k_B * T))
    n_cut = max(int(math.log(1e-12) / math.log(s)) + 1, 8)
    n = np.arange(n_cut + 1)
    weights = (1 - s) * s**n
    weights /= weights.sum()
    phases = np.sqrt(n)[None, :] * (0.5 * Omega_R) * t[:, None]
    return (weights[None, :] * np.cos(phases) ** 2).sum(axis=1)


def fit_unit_amplitude_rabi(t, signal, window: float = 40e-6) -> float:
    """Fit the early signal with (1 + cos(Omega t))/2 and return Omega (rad/s).

    Mirrors the measurement procedure of fitting the first oscillation
    with a unit-amplitude sine; only the frequency is free.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(signal, dtype=float)
    sel = t <= window
    if sel.sum() < 8:
        raise ConfigError("fit window holds fewer than 8 samples")

    def model(tt, omega):
        return 0.5 * (1 + np.cos(omega * tt))

    # first signal minimum sets the starting guess
    i_min = int(np.argmin(y[sel]))
    omega0 = math.pi / t[sel][i_min] if t[sel][i_min] > 0 else math.pi / window
    popt, _ = curve_fit(model, t[sel], y[sel], p0=(omega0,), maxfev=10000)
    return abs(float(popt[0]))


def ensemble_mean_n(cfg: RateModelConfig, deltas, p0: PopulationVector, t_grid) -> np.ndarray:
    """Mean occupation averaged over atoms with a spread of local detunings."""
    from dataclasses import replace

    acc = np.zeros(len(t_grid))
    n = np.arange(cfg.n_max + 1)
    for d in deltas:
        q = build_rate_matrix(replace(cfg, detuning_delta=float(d)))
        traj = evolve(q, p0, t_grid)
        acc += traj @ n
    return acc / len(deltas)
