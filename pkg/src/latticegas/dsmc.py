"""Direct-simulation Monte Carlo engine for the trapped gas.

Two modes: fully classical motion in a 3D harmonic trap, and a
quantized-axial mode where each atom carries a vibrational level for the
strongly confined direction while moving classically in the plane.
Free flight is an exact per-axis phase-space rotation; collisions are
sampled per cell with a no-time-counter scheme under a static majorant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import CS, Constants
from .core import TrapConfig, ground_state_size
from .errors import ConfigError, MajorantOverflowError, NumericalError
from .kinetics import cross_section_capped

MODE_CLASSICAL = "classical3d"
MODE_QUANTIZED = "quantized_axial"

# Relative tolerance for the per-event conservation checks.
_CONS_TOL = 1e-10

# Channel probabilities of the quantized collision kernel. An inelastic
# event moves exactly two axial quanta; within the inelastic branch the
# pair deposits them on one atom (weight 1/4 each side) or one on each
# (weight 1/2), mirroring the decomposition of the second excited
# relative-motion state. Reverse channels carry identical weights, which
# is what makes the kernel microreversible. The total inelastic branching
# of 1/4 keeps the activation step rate-limiting up to k_B T ~ 3 hbar
# omega, so the fitted thermalization rate tracks the activation factor
# instead of saturating at the elastic-redistribution rate.
_P_INELASTIC = 0.25
_P_UP_ONE = _P_INELASTIC / 4.0    # per atom, n -> n + 2
_P_UP_BOTH = _P_INELASTIC / 2.0   # both atoms n -> n + 1
_P_DOWN_ONE = _P_INELASTIC / 4.0  # per atom, n -> n - 2
_P_DOWN_BOTH = _P_INELASTIC / 2.0


@dataclass
class Particle:
    """Single-atom view: position, velocity, optional axial level."""

    r: np.ndarray
    v: np.ndarray
    axial_n: int | None = None


@dataclass
class GasState:
    """Ensemble state owned by one worker; arrays are the storage of record."""

    positions: np.ndarray           # (N, 3) m
    velocities: np.ndarray          # (N, 3) m/s
    trap: TrapConfig
    mode: str = MODE_CLASSICAL
    t: float = 0.0
    rng_seed: int = 0
    axial_n: np.ndarray | None = None   # (N,) int64, quantized mode only
    rng: np.random.Generator = field(default=None, repr=False)
    n_collisions: int = 0
    n_above_threshold: int = 0
    constants: Constants = field(default=CS, repr=False)

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=float)
        self.velocities = np.ascontiguousarray(self.velocities, dtype=float)
        if self.positions.shape != self.velocities.shape or self.positions.shape[1] != 3:
            raise ConfigError("positions and velocities must both be (N, 3)")
        if self.mode not in (MODE_CLASSICAL, MODE_QUANTIZED):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_QUANTIZED:
            if self.axial_n is None:
                self.axial_n = np.zeros(len(self.positions), dtype=np.int64)
            self.axial_n = np.asarray(self.axial_n, dtype=np.int64)
            if np.any(self.axial_n < 0):
                raise ConfigError("axial quantum numbers must be >= 0")
            # z and v_z are bookkept by the quantum number instead.
            if np.any(self.positions[:, 2] != 0.0) or np.any(self.velocities[:, 2] != 0.0):
                raise ConfigError("quantized mode requires z = v_z = 0")
        if self.rng is None:
            self.rng = np.random.default_rng(self.rng_seed)

    def __len__(self):
        return len(self.positions)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([self.trap.omega_x, self.trap.omega_y, self.trap.omega_osc])

    @property
    def particles(self) -> list:
        """Materialized per-atom views (copies) for inspection."""
        ns = self.axial_n if self.mode == MODE_QUANTIZED else [None] * len(self)
        return [
            Particle(r=self.positions[i].copy(), v=self.velocities[i].copy(),
                     axial_n=None if ns[i] is None else int(ns[i]))
            for i in range(len(self))
        ]

    def kinetic_energy(self) -> float:
        m = self.constants.m_Cs
        e = 0.5 * m * float(np.sum(self.velocities**2))
        if self.mode == MODE_QUANTIZED:
            e += self.constants.hbar * self.trap.omega_osc * float(self.axial_n.sum())
        return e

    def total_energy(self) -> float:
        """Kinetic + trap potential (+ axial quanta in quantized mode)."""
        m = self.constants.m_Cs
        w2 = self.omegas**2
        if self.mode == MODE_QUANTIZED:
            w2 = w2.copy()
            w2[2] = 0.0
        pot = 0.5 * m * float(np.sum(self.positions**2 * w2))
        return self.kinetic_energy() + pot

    def check_finite(self):
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise NumericalError("non-finite particle state encountered")


@dataclass(frozen=True)
class ThermalizationResult:
    """Fitted cross-dimensional relaxation of one run."""

    T_therm: float       # fitted 1/e time, s
    T0: float            # equilibrium temperature, K
    n_bar: float         # mean density seen by an atom, m^-3
    v_rms: float         # horizontal rms velocity entering the observable, m/s
    observable: float    # 1 / (n_bar v_rms T_therm), m^2
    fit_residual: float

    def __post_init__(self):
        if self.T_therm <= 0 or self.observable <= 0:
            raise ConfigError("fitted time and observable must be positive")


def sample_thermal(
    trap: TrapConfig,
    N: int,
    T_axes,
    seed: int,
    mode: str = MODE_CLASSICAL,
    c: Constants = CS,
) -> GasState:
    """Thermal ensemble with independent per-axis temperatures.

    ``T_axes`` is (T_x, T_y, T_z); in quantized mode T_z sets the initial
    Boltzmann ladder of axial quanta (T_z = 0 gives the cold start).
    """
    if N < 1:
        raise ConfigError("need at least one particle")
    rng = np.random.default_rng(seed)
    T = np.asarray(T_axes, dtype=float)
    if np.any(T < 0):
        raise ConfigError("temperatures must be >= 0")
    m = c.m_Cs
    omegas = np.array([trap.omega_x, trap.omega_y, trap.omega_osc])
    sig_v = np.sqrt(c.k_B * T / m)
    sig_r = sig_v / omegas
    if mode == MODE_QUANTIZED:
        sig_v = sig_v.copy()
        sig_r = sig_r.copy()
        sig_v[2] = 0.0
        sig_r[2] = 0.0
    pos = rng.normal(0.0, 1.0, size=(N, 3)) * sig_r
    vel = rng.normal(0.0, 1.0, size=(N, 3)) * sig_v
    axial = None
    if mode == MODE_QUANTIZED:
        if T[2] == 0.0:
            axial = np.zeros(N, dtype=np.int64)
        else:
            q = math.exp(-c.hbar * trap.omega_osc / (c.k_B * T[2]))
            axial = rng.geometric(1 - q, size=N).astype(np.int64) - 1
    return GasState(
        positions=pos, velocities=vel, trap=trap, mode=mode,
        rng_seed=seed, axial_n=axial, rng=rng, constants=c,
    )


def advance_free(state: GasState, dt: float) -> GasState:
    """Exact harmonic propagation: per-axis phase-space rotation by omega dt."""
    if dt <= 0:
        raise ConfigError("dt must be positive")
    w = state.omegas
    active = slice(0, 2) if state.mode == MODE_QUANTIZED else slice(0, 3)
    w = w[active]
    cw = np.cos(w * dt)
    sw = np.sin(w * dt)
    x = state.positions[:, active].copy()
    v = state.velocities[:, active].copy()
    state.positions[:, active] = x * cw + (v / w) * sw
    state.velocities[:, active] = v * cw - x * w * sw
    state.t += dt
    state.check_finite()
    return state


# ---------------------------------------------------------------------------
# Cell grid and pair sampling


class _CellGrid:
    """Fixed uniform grid sized from the initial cloud."""

    def __init__(self, state: GasState, cells_per_sigma: float = 4.0, span_sigmas: float = 6.0):
        dims = 2 if state.mode == MODE_QUANTIZED else 3
        self.dims = dims
        sig = np.maximum(np.std(state.positions[:, :dims], axis=0), 1e-12)
        self.h = sig / cells_per_sigma
        self.lo = -span_sigmas * sig
        self.n_per_axis = np.maximum(
            np.ceil((span_sigmas * sig - self.lo) / self.h).astype(int), 1
        )
        self.ncells = int(np.prod(self.n_per_axis))
        self.volume = float(np.prod(self.h))   # cell area in 2D

    def cell_index(self, positions: np.ndarray) -> np.ndarray:
        idx = np.floor((positions[:, : self.dims] - self.lo) / self.h).astype(np.int64)
        np.clip(idx, 0, self.n_per_axis - 1, out=idx)
        lin = idx[:, 0]
        for d in range(1, self.dims):
            lin = lin * self.n_per_axis[d] + idx[:, d]
        return lin


def classical_majorant(trap: TrapConfig, c: Constants = CS) -> tuple:
    """Static (sigma v)_max and the wavevector floor that produces it.

    sigma v decreases with speed above the cap crossover and increases
    below it, so the product peaks exactly at the crossover: the bound is
    32 pi hbar l0 / m with l0 the axial ground-state size.
    """
    l0 = ground_state_size(trap.omega_osc, c)
    k_min = 1.0 / (2 * l0)
    lam_max = 32 * np.pi * c.hbar * l0 / c.m_Cs
    return lam_max, k_min


def _draw_pairs_in_cells(rng, counts, starts, n_cand):
    """Uniform distinct index pairs inside each candidate's cell."""
    c_rep = np.repeat(counts, n_cand)
    s_rep = np.repeat(starts, n_cand)
    i1 = np.floor(rng.random(len(c_rep)) * c_rep).astype(np.int64)
    i2 = np.floor(rng.random(len(c_rep)) * (c_rep - 1)).astype(np.int64)
    i2 += (i2 >= i1)
    return s_rep + i1, s_rep + i2


def _candidate_pairs(state: GasState, grid: _CellGrid, rate_per_vol: float, dt: float,
                     exhaustive: bool = False):
    """Candidate particle-index pairs for this step.

    NTC sampling: per occupied cell, Poisson(npairs * rate * dt / V) pair
    draws. Exhaustive mode enumerates every within-cell pair instead (the
    O(N^2) cross-check for small N).
    """
    cell = grid.cell_index(state.positions)
    order = np.argsort(cell, kind="stable")
    sorted_cells = cell[order]
    uniq, starts, counts = np.unique(sorted_cells, return_index=True, return_counts=True)
    multi = counts >= 2
    counts = counts[multi]
    starts = starts[multi]
    if len(counts) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64), 0.0
    per_pair_p = rate_per_vol * dt / grid.volume
    if per_pair_p >= 0.1:
        raise ConfigError(
            f"per-pair collision probability {per_pair_p:.3f} >= 0.1; reduce dt"
        )
    if exhaustive:
        p1_list, p2_list = [], []
        for s, n in zip(starts, counts):
            ii, jj = np.triu_indices(n, k=1)
            p1_list.append(order[s + ii])
            p2_list.append(order[s + jj])
        return np.concatenate(p1_list), np.concatenate(p2_list), per_pair_p
    npairs = counts * (counts - 1) / 2
    n_cand = state.rng.poisson(npairs * per_pair_p)
    keep = n_cand > 0
    if not np.any(keep):
        return np.empty(0, np.int64), np.empty(0, np.int64), 1.0
    j1, j2 = _draw_pairs_in_cells(state.rng, counts[keep], starts[keep], n_cand[keep])
    return order[j1], order[j2], 1.0


def _check_pair_conservation(m, v1_old, v2_old, v1_new, v2_new, extra_old=0.0, extra_new=0.0):
    p_old = m * (v1_old + v2_old)
    p_new = m * (v1_new + v2_new)
    e_old = 0.5 * m * (v1_old @ v1_old + v2_old @ v2_old) + extra_old
    e_new = 0.5 * m * (v1_new @ v1_new + v2_new @ v2_new) + extra_new
    p_scale = m * (np.linalg.norm(v1_old) + np.linalg.norm(v2_old)) + 1e-300
    if np.max(np.abs(p_new - p_old)) > _CONS_TOL * p_scale:
        raise NumericalError("pair momentum not conserved")
    if abs(e_new - e_old) > _CONS_TOL * (abs(e_old) + 1e-300):
        raise NumericalError("pair energy not conserved")


def collide_classical(state: GasState, dt: float, grid: _CellGrid | None = None,
                      exhaustive: bool = False) -> tuple:
    """One collision step in classical mode; returns (state, events).

    Candidates are screened against the static majorant with snapshot
    velocities; accepted events are applied sequentially (center-of-mass
    velocity kept, relative speed kept, direction redrawn isotropically).
    """
    if state.mode != MODE_CLASSICAL:
        raise ConfigError("collide_classical requires classical3d mode")
    c = state.constants
    if grid is None:
        grid = _CellGrid(state)
    lam_max, k_min = classical_majorant(state.trap, c)
    p1, p2, _ = _candidate_pairs(state, grid, lam_max, dt, exhaustive=exhaustive)
    if len(p1) == 0:
        return state, 0
    rng = state.rng
    v = state.velocities
    u = v[p1] - v[p2]
    umag = np.sqrt(np.sum(u * u, axis=1))
    sig_v = cross_section_capped(umag, k_min, c) * umag
    p_acc = sig_v / lam_max
    over = p_acc > 1.0 + 1e-9
    if np.any(over):
        raise MajorantOverflowError(
            f"{int(over.sum())} candidates exceeded the majorant "
            f"(max ratio {p_acc.max():.3f}); shrink dt and retry"
        )
    if exhaustive:
        # per-pair probability folded in directly (no majorant screening)
        p_acc = sig_v * dt / grid.volume
        if np.any(p_acc >= 0.5):
            raise ConfigError("exhaustive pairing needs a smaller dt")
    accepted = np.nonzero(rng.random(len(p1)) < p_acc)[0]
    m = c.m_Cs
    events = 0
    for idx in accepted:
        a, b = int(p1[idx]), int(p2[idx])
        if a == b:
            continue
        v1, v2 = v[a].copy(), v[b].copy()
        vcm = 0.5 * (v1 + v2)
        urel = v1 - v2
        speed = math.sqrt(urel @ urel)
        if speed == 0.0:
            continue
        nvec = rng.normal(size=3)
        nnorm = math.sqrt(nvec @ nvec)
        if nnorm == 0.0:
            continue
        half = 0.5 * speed / nnorm * nvec
        v[a] = vcm + half
        v[b] = vcm - half
        _check_pair_conservation(m, v1, v2, v[a], v[b])
        events += 1
    state.n_collisions += events
    state.check_finite()
    return state, events


def collide_quantized(state: GasState, dt: float, grid: _CellGrid | None = None) -> tuple:
    """One collision step in quantized-axial mode; returns (state, events).

    Pairs collide at the velocity-independent quasi-2D rate hbar/m per
    unit area. Below the 2 hbar omega threshold the planar relative
    velocity is redrawn isotropically; above it the pair may absorb
    exactly two axial quanta (single-atom +2 or one each), and the
    reverse channels release them with the mirrored weights.
    """
    if state.mode != MODE_QUANTIZED:
        raise ConfigError("collide_quantized requires quantized_axial mode")
    c = state.constants
    if grid is None:
        grid = _CellGrid(state)
    rate_per_area = c.hbar / c.m_Cs
    p1, p2, _ = _candidate_pairs(state, grid, rate_per_area, dt)
    if len(p1) == 0:
        return state, 0
    rng = state.rng
    v = state.velocities
    ns = state.axial_n
    m = c.m_Cs
    hw = c.hbar * state.trap.omega_osc
    equantum = 2 * hw                      # energy moved by one inelastic event
    events = 0
    for idx in range(len(p1)):
        a, b = int(p1[idx]), int(p2[idx])
        if a == b:
            continue
        v1 = v[a, :2].copy()
        v2 = v[b, :2].copy()
        vcm = 0.5 * (v1 + v2)
        urel = v1 - v2
        usq = urel @ urel
        e_rel = 0.25 * m * usq            # relative kinetic energy, reduced mass m/2
        above = e_rel >= equantum
        events += 1
        if above:
            state.n_above_threshold += 1
        # Channel selection; a single uniform keeps the draw count fixed.
        # Up channels occupy [0, p_in), down channels [p_in, 2 p_in);
        # anything else (or a blocked channel) scatters elastically.
        r = rng.random()
        dn_a = dn_b = 0
        if r < _P_INELASTIC:
            if above:
                if r < _P_UP_ONE:
                    dn_a = 2
                elif r < 2 * _P_UP_ONE:
                    dn_b = 2
                else:
                    dn_a = dn_b = 1
        elif r < 2 * _P_INELASTIC:
            r -= _P_INELASTIC
            if r < _P_DOWN_ONE:
                if ns[a] >= 2:
                    dn_a = -2
            elif r < 2 * _P_DOWN_ONE:
                if ns[b] >= 2:
                    dn_b = -2
            elif ns[a] >= 1 and ns[b] >= 1:
                dn_a = dn_b = -1
        dn_tot = dn_a + dn_b
        new_usq = usq - dn_tot * 4 * hw / m
        phi = 2 * np.pi * rng.random()
        new_u = math.sqrt(max(new_usq, 0.0)) * np.array([math.cos(phi), math.sin(phi)])
        n1_old, n2_old = int(ns[a]), int(ns[b])
        ns[a] += dn_a
        ns[b] += dn_b
        v[a, :2] = vcm + 0.5 * new_u
        v[b, :2] = vcm - 0.5 * new_u
        _check_pair_conservation(
            m,
            np.append(v1, 0.0), np.append(v2, 0.0),
            v[a], v[b],
            extra_old=(n1_old + n2_old) * hw,
            extra_new=(int(ns[a]) + int(ns[b])) * hw,
        )
    state.n_collisions += events
    state.check_finite()
    return state, events


# ---------------------------------------------------------------------------
# Step drivers


def default_dt(state: GasState, c: Constants = CS) -> float:
    """Step size: 1/50 of the fastest horizontal period, tightened if the
    estimated peak collision rate is faster."""
    period_h = 2 * np.pi / max(state.trap.omega_x, state.trap.omega_y)
    dt = period_h / 50.0
    sig = np.std(state.positions, axis=0)
    if state.mode == MODE_QUANTIZED:
        n_peak = len(state) / (2 * np.pi * sig[0] * sig[1]) if sig[0] * sig[1] > 0 else 0.0
        gamma = c.hbar / c.m_Cs * n_peak
    else:
        vols = float(np.prod(np.maximum(sig, 1e-12))) * (2 * np.pi) ** 1.5
        n_peak = len(state) / vols
        kt = c.m_Cs * float(np.mean(state.velocities**2))  # ~3 k_B T
        kt = max(kt / 3.0, 1e-300)
        sig_v_mean = 32 * math.sqrt(math.pi) * c.hbar**2 / (c.m_Cs * math.sqrt(c.m_Cs * kt))
        gamma = n_peak * sig_v_mean
    if gamma > 0:
        dt = min(dt, 1.0 / (20.0 * gamma))
    return dt


def step(state: GasState, dt: float, grid: _CellGrid, max_retries: int = 3) -> int:
    """Advance free flight then collide; on majorant overflow the collision
    sub-step is retried with a halved dt (twice per halving)."""
    advance_free(state, dt)
    collide = collide_classical if state.mode == MODE_CLASSICAL else collide_quantized
    pieces = [dt]
    events = 0
    retries = 0
    while pieces:
        d = pieces.pop()
        try:
            _, n = collide(state, d, grid=grid)
            events += n
        except MajorantOverflowError:
            retries += 1
            if retries > max_retries:
                raise
            warnings.warn("majorant overflow; retrying collision sub-step with dt/2",
                          stacklevel=2)
            pieces.extend([d / 2, d / 2])
    return events


def run_relaxation(
    state: GasState,
    t_total: float,
    dt: float | None = None,
    sample_every: int = 25,
):
    """Evolve the state and record rms velocities (or the axial occupation).

    Returns (t, columns) where columns maps names to arrays:
    vx_rms, vy_rms, vz_rms or mean_axial_n, N, collisions.
    """
    from .analysis import TimeSeries  # local import to avoid a cycle

    c = state.constants
    if dt is None:
        dt = default_dt(state, c)
    grid = _CellGrid(state)
    nsteps = max(int(round(t_total / dt)), 1)
    times, vx, vy, vz, nn, cols_count = [], [], [], [], [], []

    def record():
        times.append(state.t)
        v2 = np.mean(state.velocities**2, axis=0)
        vx.append(math.sqrt(v2[0]))
        vy.append(math.sqrt(v2[1]))
        if state.mode == MODE_QUANTIZED:
            vz.append(float(np.mean(state.axial_n)))
        else:
            vz.append(math.sqrt(v2[2]))
        nn.append(len(state))
        cols_count.append(state.n_collisions)

    record()
    for i in range(nsteps):
        step(state, dt, grid)
        if (i + 1) % sample_every == 0 or i == nsteps - 1:
            record()
    zname = "mean_axial_n" if state.mode == MODE_QUANTIZED else "vz_rms"
    cols = {
        "vx_rms": np.array(vx),
        "vy_rms": np.array(vy),
        zname: np.array(vz),
        "N": np.array(nn, dtype=float),
        "collisions": np.array(cols_count, dtype=float),
    }
    units = {"vx_rms": "m/s", "vy_rms": "m/s", zname: "m/s" if zname == "vz_rms" else "1",
             "N": "1", "collisions": "1"}
    return TimeSeries(t=np.array(times), columns=cols, units=units)
