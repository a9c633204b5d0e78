"""Scenario ingestion and batch orchestration.

One JSON document describes one experiment: mode, trap, particle count,
initial temperatures, schedule, optional sweep and replica count. Runs
are deterministic: replica i uses seed + i, every output is CSV with a
'#' metadata header, and rerunning a (config, seed) pair reproduces the
files byte for byte.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .constants import CS
from .core import TrapConfig, rescale_frequencies, two_step_final_temperature
from .errors import ConfigError
from .analysis import TimeSeries, fit_exponential, kinetic_invariant
from .dsmc import (
    MODE_CLASSICAL,
    MODE_QUANTIZED,
    sample_thermal,
    run_relaxation,
    ThermalizationResult,
)
from .kinetics import analytic_t_therm_classical, suppression_factor
from .sideband import (
    RateModelConfig,
    PopulationVector,
    build_rate_matrix,
    steady_state,
    cooling_rate,
    trajectory_records,
)

MODES = (MODE_CLASSICAL, MODE_QUANTIZED, "sideband_rate_model", "analytic_only")
PHASE_KINDS = ("cool", "free_thermalize", "rescale_alpha")

_VERSION = "0.1.0"


@dataclass(frozen=True)
class Phase:
    kind: str
    duration: float
    alpha_new: float | None = None

    def __post_init__(self):
        if self.kind not in PHASE_KINDS:
            raise ConfigError(f"field 'schedule.kind': unknown phase {self.kind!r}")
        if not self.duration > 0:
            raise ConfigError("field 'schedule.duration': every phase duration must be > 0")
        if self.kind == "rescale_alpha" and self.alpha_new is None:
            raise ConfigError("field 'schedule.alpha_new': rescale phase needs a target angle")


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one simulated experiment."""

    mode: str
    trap: TrapConfig
    N: int = 1000
    T_init: tuple = (10e-6, 10e-6, 10e-6)
    schedule: tuple = ()
    sweep: dict | None = None
    replicas: int = 1
    seed: int = 12345
    outputs: tuple | None = None
    rate_model: dict | None = None
    options: dict = field(default_factory=dict)
    name: str = "scenario"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"field 'mode': {self.mode!r} not one of {MODES}")
        if self.N < 1:
            raise ConfigError("field 'N': particle count must be >= 1")
        if self.replicas < 1:
            raise ConfigError("field 'replicas': replica count must be >= 1")
        if len(self.T_init) != 3 or any(t < 0 for t in self.T_init):
            raise ConfigError("field 'T_init': need three non-negative temperatures")
        if self.sweep is not None:
            if "name" not in self.sweep or "values" not in self.sweep:
                raise ConfigError("field 'sweep': needs 'name' and 'values'")
            if len(self.sweep["values"]) == 0:
                raise ConfigError("field 'sweep.values': sweep grid must be non-empty")
        if self.mode == "sideband_rate_model" and self.rate_model is None:
            raise ConfigError("field 'rate_model': required for sideband_rate_model mode")
        for ph in self.schedule:
            if not isinstance(ph, Phase):
                raise ConfigError("field 'schedule': entries must be Phase objects")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["T_init"] = list(self.T_init)
        d["schedule"] = [asdict(p) for p in self.schedule]
        d["outputs"] = None if self.outputs is None else list(self.outputs)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        trap = d.pop("trap")
        if isinstance(trap, dict):
            trap = TrapConfig(**trap)
        schedule = tuple(
            Phase(**p) if isinstance(p, dict) else p for p in d.pop("schedule", ())
        )
        d["T_init"] = tuple(d.get("T_init", (10e-6, 10e-6, 10e-6)))
        outputs = d.get("outputs")
        d["outputs"] = None if outputs is None else tuple(outputs)
        return cls(trap=trap, schedule=schedule, **d)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def with_updates(self, **kw) -> "ScenarioConfig":
        return dataclasses.replace(self, **kw)


@dataclass
class RunManifest:
    config_hash: str
    seeds: list
    started: float
    finished: float
    outputs: list
    version: str = _VERSION
    extra: dict = field(default_factory=dict)

    def write(self, path: Path):
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True))


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        return ScenarioConfig.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header_meta: dict, columns: dict):
    names = list(columns)
    n = len(next(iter(columns.values())))
    lines = [f"# latticegas {_VERSION}"]
    for k, v in header_meta.items():
        lines.append(f"# {k}: {v}")
    lines.append(",".join(names))
    cols = [np.asarray(columns[k]) for k in names]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in cols))
    path.write_text("\n".join(lines) + "\n")


def _aggregate(columns_list: list) -> dict:
    """Mean and standard error across replicas, column by column."""
    out = {}
    names = list(columns_list[0])
    for name in names:
        stack = np.vstack([c[name] for c in columns_list])
        out[f"{name}_mean"] = stack.mean(axis=0)
        nrep = stack.shape[0]
        out[f"{name}_stderr"] = (
            stack.std(axis=0, ddof=1) / math.sqrt(nrep) if nrep > 1 else np.zeros(stack.shape[1])
        )
    return out


# ---------------------------------------------------------------------------
# Per-mode executors (module level so they can cross process boundaries)


def equilibrium_temperature(T_init) -> float:
    return float(sum(T_init)) / 3.0


def initial_mean_density(trap: TrapConfig, N: int, T_init, c=CS) -> float:
    """Mean 3D density seen by an atom for per-axis thermal widths."""
    sig = [
        math.sqrt(c.k_B * T_init[0] / c.m_Cs) / trap.omega_x,
        math.sqrt(c.k_B * T_init[1] / c.m_Cs) / trap.omega_y,
        math.sqrt(c.k_B * T_init[2] / c.m_Cs) / trap.omega_osc,
    ]
    n0 = N / ((2 * math.pi) ** 1.5 * sig[0] * sig[1] * sig[2])
    return n0 / (2 * math.sqrt(2))


def run_thermalization_replica(scen_dict: dict, seed: int) -> dict:
    """One classical relaxation: free flight + collisions, then the fit."""
    scen = ScenarioConfig.from_dict(scen_dict)
    c = CS
    duration = sum(p.duration for p in scen.schedule if p.kind == "free_thermalize")
    if duration <= 0:
        raise ConfigError("field 'schedule': classical3d needs a free_thermalize phase")
    state = sample_thermal(scen.trap, scen.N, scen.T_init, seed=seed, mode=MODE_CLASSICAL)
    sample_every = int(scen.options.get("sample_every", 25))
    ts = run_relaxation(state, duration, sample_every=sample_every)
    fit = fit_exponential(ts, "vz_rms")
    T0 = equilibrium_temperature(scen.T_init)
    n_bar = initial_mean_density(scen.trap, scen.N, scen.T_init, c)
    v_rms = math.sqrt(c.k_B * T0 / c.m_Cs)
    result = ThermalizationResult(
        T_therm=fit.tau,
        T0=T0,
        n_bar=n_bar,
        v_rms=v_rms,
        observable=1.0 / (n_bar * v_rms * fit.tau),
        fit_residual=fit.residual_rms,
    )
    drift = kinetic_invariant(ts)
    cols = {"t": ts.t, **ts.columns}
    return {
        "columns": cols,
        "fit": asdict(result),
        "kinetic_drift": drift,
        "seed": seed,
        "collisions": int(state.n_collisions),
    }


def run_quantized_replica(scen_dict: dict, seed: int) -> dict:
    """One quasi-2D relaxation with quantized axial levels."""
    scen = ScenarioConfig.from_dict(scen_dict)
    c = CS
    duration = sum(p.duration for p in scen.schedule if p.kind == "free_thermalize")
    if duration <= 0:
        raise ConfigError("field 'schedule': quantized_axial needs a free_thermalize phase")
    state = sample_thermal(scen.trap, scen.N, scen.T_init, seed=seed, mode=MODE_QUANTIZED)
    for ph in scen.schedule:
        if ph.kind == "cool":
            state.axial_n[:] = 0  # idealized 1D sideband cooling
    sample_every = int(scen.options.get("sample_every", 25))
    ts = run_relaxation(state, duration, sample_every=sample_every)
    fit = fit_exponential(ts, "mean_axial_n")
    frac_above = (
        state.n_above_threshold / state.n_collisions if state.n_collisions else float("nan")
    )
    cols = {"t": ts.t, **ts.columns}
    return {
        "columns": cols,
        "fit": {"tau": fit.tau, "amplitude": fit.amplitude, "offset": fit.offset,
                "residual_rms": fit.residual_rms},
        "seed": seed,
        "collisions": int(state.n_collisions),
        "above_threshold_fraction": frac_above,
        "duration": duration,
    }


def run_sideband_point(scen: ScenarioConfig, rate_model: dict) -> dict:
    cfg_kwargs = {"omega_osc": scen.trap.omega_osc}
    cfg_kwargs.update(rate_model)
    cfg = RateModelConfig(**cfg_kwargs)
    q = build_rate_matrix(cfg)
    ss = steady_state(q)
    excited = float(ss.p3[1:].sum())
    return {
        "Gamma_prime": cfg.Gamma_prime,
        "detuning_delta": cfg.detuning_delta,
        "sigma_minus_fraction": cfg.sigma_minus_fraction,
        "Omega_R": cfg.Omega_R,
        "p31": float(ss.p3[1]),
        "excited_population": excited,
        "cooling_rate": cooling_rate(cfg),
    }


def run_analytic_point(scen: ScenarioConfig, T0: float) -> dict:
    n_bar = initial_mean_density(scen.trap, scen.N, (T0, T0, T0))
    t_therm, obs = analytic_t_therm_classical(n_bar, T0)
    return {
        "T0": T0,
        "n_bar": n_bar,
        "v_rms": math.sqrt(CS.k_B * T0 / CS.m_Cs),
        "T_therm": t_therm,
        "observable": obs,
        "suppression_2hw": suppression_factor(T0, scen.trap.omega_osc),
    }


def run_two_step(scen: ScenarioConfig) -> dict:
    """Walk the alpha schedule and report the frequency bookkeeping."""
    trap = scen.trap
    beta = float(scen.options.get("beta", 0.7))
    rows = {"phase": [], "alpha_deg": [], "omega_z": [], "omega_x": [], "depth_U0": []}
    trap0 = trap
    for i, ph in enumerate(scen.schedule):
        if ph.kind == "rescale_alpha":
            trap = rescale_frequencies(trap, ph.alpha_new)
        rows["phase"].append(i)
        rows["alpha_deg"].append(math.degrees(trap.alpha))
        rows["omega_z"].append(trap.omega_osc)
        rows["omega_x"].append(trap.omega_x)
        rows["depth_U0"].append(trap.depth_U0)
    rescaled = [p.alpha_new for p in scen.schedule if p.kind == "rescale_alpha"]
    if rescaled:
        trap2 = rescale_frequencies(trap0, rescaled[0])
        ratio_z = trap2.omega_osc / trap0.omega_osc
        ratio_x = trap2.omega_x / trap0.omega_x
        final_reduced_T = two_step_final_temperature(beta, trap0, trap2)
    else:
        ratio_z = ratio_x = 1.0
        final_reduced_T = beta
    return {
        "rows": rows,
        "ratio_z": ratio_z,
        "ratio_x": ratio_x,
        "beta": beta,
        "final_reduced_T": final_reduced_T,
    }


# ---------------------------------------------------------------------------
# Freeze-out demo: quantized plane vs a matched classical reference gas


def quantized_plane_scenario(kt_over_hw: float, N: int, replicas: int, seed: int,
                             omega_osc: float = 2 * math.pi * 80e3) -> ScenarioConfig:
    """Cold-axial-start relaxation of one lattice plane at the given k_B T / hbar omega."""
    T = kt_over_hw * CS.hbar * omega_osc / CS.k_B
    trap = _freezeout_plane_trap(T, N, omega_osc)
    gamma = CS.hbar / CS.m_Cs * N * CS.m_Cs * trap.omega_x * trap.omega_y / (
        4 * math.pi * CS.k_B * T
    )
    x = 1.0 / kt_over_hw
    tau_est = 1.0 / (0.25 * gamma * math.exp(-x))
    period = 2 * math.pi / trap.omega_x
    duration = max(3.5 * tau_est, 50 * period)
    return ScenarioConfig(
        mode=MODE_QUANTIZED,
        trap=trap,
        N=N,
        T_init=(T, T, 0.0),
        schedule=(Phase("free_thermalize", duration),),
        replicas=replicas,
        seed=seed,
        name=f"freezeout_q_kt{kt_over_hw:g}",
    )


def classical_twin_scenario(quantized: ScenarioConfig) -> ScenarioConfig:
    """Classical gas with the same planar geometry and a matched collision rate.

    The axial frequency is solved so the per-atom elastic rate equals one
    tenth of the horizontal trap frequency (the same collisionality as the
    quantized run); the axial temperature starts at a quarter of the
    horizontal one so the same cross-dimensional relaxation is fitted.
    """
    c = CS
    T = quantized.T_init[0]
    trap_q = quantized.trap
    T_eq = (2 * T + 0.25 * T) / 3.0
    kT = c.k_B * T_eq
    sig_h2 = (kT / c.m_Cs) / (trap_q.omega_x * trap_q.omega_y)
    sv = 32 * math.sqrt(math.pi) * c.hbar**2 / (c.m_Cs * math.sqrt(c.m_Cs * kT))
    # per-atom rate n_bar <sigma v>, with n_bar linear in omega_z
    def gamma_of_wz(wz):
        sig_z = math.sqrt(kT / c.m_Cs) / wz
        n_bar = quantized.N / (8 * math.pi**1.5 * sig_h2 * sig_z)
        return n_bar * sv

    target = 0.1 * trap_q.omega_x / (2 * math.pi)
    wz = trap_q.omega_x * 12.0
    wz *= target / gamma_of_wz(wz)
    wz = max(wz, 10.5 * trap_q.omega_x)
    gamma = gamma_of_wz(wz)
    tau_est = 7.5 / gamma
    trap = TrapConfig(
        omega_osc=wz,
        omega_x=trap_q.omega_x,
        omega_y=trap_q.omega_y,
        depth_U0=trap_q.depth_U0,
    )
    return ScenarioConfig(
        mode=MODE_CLASSICAL,
        trap=trap,
        N=quantized.N,
        T_init=(T, T, 0.25 * T),
        schedule=(Phase("free_thermalize", 3.5 * tau_est),),
        replicas=quantized.replicas,
        seed=quantized.seed + 500,
        name=quantized.name.replace("_q_", "_c_"),
    )


def run_freezeout_point(kt_over_hw: float, N: int = 3000, replicas: int = 8,
                        seed: int = 7000, omega_osc: float = 2 * math.pi * 80e3,
                        workers: int = 1) -> dict:
    """Fitted quantized and classical relaxation rates at one temperature.

    Returns per-collision thermalization efficiencies for both modes; their
    ratio is the freeze-out suppression to compare with e^(-hbar omega/kT).
    """
    scen_q = quantized_plane_scenario(kt_over_hw, N, replicas, seed, omega_osc)
    scen_c = classical_twin_scenario(scen_q)

    def execute(scen, worker):
        rep_seeds = [scen.seed + i for i in range(scen.replicas)]
        sd = scen.to_dict()
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(worker, [sd] * len(rep_seeds), rep_seeds))
        return [worker(sd, s) for s in rep_seeds]

    res_q = execute(scen_q, run_quantized_replica)
    res_c = execute(scen_c, run_thermalization_replica)

    def rate_and_gamma(results, duration):
        taus = np.array([r["fit"].get("tau", r["fit"].get("T_therm")) for r in results])
        gammas = np.array([
            2.0 * r["collisions"] / (r["columns"]["N"][0] * duration) for r in results
        ])
        return 1.0 / taus, gammas

    dur_q = scen_q.schedule[0].duration
    dur_c = scen_c.schedule[0].duration
    rq, gq = rate_and_gamma(res_q, dur_q)
    rc, gc = rate_and_gamma(res_c, dur_c)
    eff_q = rq / gq
    eff_c = rc / gc
    frac = np.array([r["above_threshold_fraction"] for r in res_q])
    return {
        "kt_over_hw": kt_over_hw,
        "rate_quantized": float(rq.mean()),
        "rate_quantized_stderr": float(rq.std(ddof=1) / math.sqrt(len(rq))) if len(rq) > 1 else 0.0,
        "rate_classical": float(rc.mean()),
        "gamma_quantized": float(gq.mean()),
        "gamma_classical": float(gc.mean()),
        "efficiency_quantized": float(eff_q.mean()),
        "efficiency_classical": float(eff_c.mean()),
        "suppression": float(eff_q.mean() / eff_c.mean()),
        "exp_factor": math.exp(-1.0 / kt_over_hw),
        "above_threshold_fraction": float(frac.mean()),
        "scenario_q": scen_q,
        "scenario_c": scen_c,
    }


# ---------------------------------------------------------------------------
# run()


def _sweep_points(scen: ScenarioConfig):
    if scen.sweep is None:
        return [(None, scen)]
    name = scen.sweep["name"]
    points = []
    for val in scen.sweep["values"]:
        if name == "T0":
            t0 = float(val)
            base = max(scen.T_init)
            factors = tuple(t / base for t in scen.T_init)
            sub = scen.with_updates(
                T_init=tuple(f * t0 for f in factors), sweep=None,
                name=f"{scen.name}_T{t0 * 1e6:g}uK",
            )
        elif name == "rate_model":
            rm = dict(scen.rate_model or {})
            rm.update(val)
            sub = scen.with_updates(rate_model=rm, sweep=None,
                                    name=f"{scen.name}_{len(points)}")
        else:
            raise ConfigError(f"field 'sweep.name': unsupported sweep {name!r}")
        points.append((val, sub))
    return points


def run(scenario: ScenarioConfig, out_dir, workers: int = 1) -> RunManifest:
    """Execute a scenario and write every declared output under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    outputs = []
    seeds = []
    extra = {}

    points = _sweep_points(scenario)

    if scenario.mode == MODE_QUANTIZED and scenario.options.get("classical_twin"):
        hw_over_k = CS.hbar * scenario.trap.omega_osc / CS.k_B
        rows = []
        for _, sub in points:
            # T_init = (T, T, 0): the horizontal temperature sets k_B T / hbar omega
            kt = sub.T_init[0] / hw_over_k
            point = run_freezeout_point(
                kt, N=sub.N, replicas=sub.replicas, seed=sub.seed,
                omega_osc=scenario.trap.omega_osc, workers=workers,
            )
            seeds.extend(point["scenario_q"].seed + i for i in range(sub.replicas))
            rows.append({k: v for k, v in point.items()
                         if not k.startswith("scenario")})
        cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
        path = out / f"{scenario.name}_summary.csv"
        write_csv(path, {"config_hash": scenario.config_hash()}, cols)
        outputs.append(str(path))
        manifest = RunManifest(
            config_hash=scenario.config_hash(), seeds=seeds, started=started,
            finished=time.time(), outputs=outputs,
        )
        manifest.write(out / f"{scenario.name}_manifest.json")
        return manifest

    if scenario.mode == "analytic_only":
        if any(p.kind == "rescale_alpha" for p in scenario.schedule):
            info = run_two_step(scenario)
            path = out / f"{scenario.name}_two_step.csv"
            write_csv(path, {"config_hash": scenario.config_hash()}, info["rows"])
            outputs.append(str(path))
            extra.update({k: info[k] for k in ("ratio_z", "ratio_x", "beta", "final_reduced_T")})
        else:
            rows = [run_analytic_point(sub, equilibrium_temperature(sub.T_init))
                    for _, sub in points]
            cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
            path = out / f"{scenario.name}_analytic.csv"
            write_csv(path, {"config_hash": scenario.config_hash()}, cols)
            outputs.append(str(path))
    elif scenario.mode == "sideband_rate_model":
        rows = [run_sideband_point(sub, sub.rate_model) for _, sub in points]
        cols = {k: np.array([r[k] for r in rows]) for k in rows[0]}
        path = out / f"{scenario.name}_sideband.csv"
        write_csv(path, {"config_hash": scenario.config_hash()}, cols)
        outputs.append(str(path))
        durations = [p.duration for p in scenario.schedule]
        if durations and scenario.rate_model is not None:
            cfg = RateModelConfig(omega_osc=scenario.trap.omega_osc, **scenario.rate_model)
            q = build_rate_matrix(cfg)
            mean_n0 = float(scenario.options.get("initial_mean_n", 5.8))
            p0 = PopulationVector.thermal(mean_n0, cfg.n_max)
            grid = np.linspace(0.0, sum(durations), int(scenario.options.get("samples", 200)))
            ts = trajectory_records(q, p0, grid[1:], cfg)
            path = out / f"{scenario.name}_trajectory.csv"
            sel = scenario.outputs or ("mean_n", "kT_over_hw", "p3_0", "p3_1")
            cols = {"t": ts.t, **{k: ts.columns[k] for k in sel if k in ts.columns}}
            write_csv(path, {"config_hash": scenario.config_hash()}, cols)
            outputs.append(str(path))
    else:
        worker = (
            run_thermalization_replica
            if scenario.mode == MODE_CLASSICAL
            else run_quantized_replica
        )
        for _, sub in points:
            rep_seeds = [sub.seed + i for i in range(sub.replicas)]
            seeds.extend(rep_seeds)
            sub_dict = sub.to_dict()
            if workers > 1 and sub.replicas > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(worker, [sub_dict] * sub.replicas, rep_seeds))
            else:
                results = [worker(sub_dict, s) for s in rep_seeds]
            all_cols = []
            fit_rows = []
            for i, res in enumerate(results):
                cols = res["columns"]
                if sub.outputs is not None:
                    cols = {k: v for k, v in cols.items()
                            if k == "t" or k in sub.outputs}
                path = out / f"{sub.name}_rep{i:03d}.csv"
                write_csv(path, {"config_hash": sub.config_hash(), "seed": res["seed"]}, cols)
                outputs.append(str(path))
                all_cols.append(cols)
                row = dict(res["fit"])
                row["seed"] = res["seed"]
                row["collisions"] = res["collisions"]
                for key in ("kinetic_drift", "above_threshold_fraction"):
                    if key in res:
                        row[key] = res[key]
                fit_rows.append(row)
            agg = _aggregate(all_cols)
            path = out / f"{sub.name}_aggregate.csv"
            write_csv(path, {"config_hash": sub.config_hash(), "replicas": sub.replicas}, agg)
            outputs.append(str(path))
            fit_cols = {k: np.array([r[k] for r in fit_rows]) for k in fit_rows[0]}
            path = out / f"{sub.name}_fits.csv"
            write_csv(path, {"config_hash": sub.config_hash()}, fit_cols)
            outputs.append(str(path))

    manifest = RunManifest(
        config_hash=scenario.config_hash(),
        seeds=seeds,
        started=started,
        finished=time.time(),
        outputs=outputs,
        extra=extra,
    )
    manifest.write(out / f"{scenario.name}_manifest.json")
    return manifest


# ---------------------------------------------------------------------------
# Presets (data, not code paths)


def _classical_relax_scenario(T0: float, N: int = 5000, replicas: int = 20,
                              seed: int = 9000, name: str = "relax") -> ScenarioConfig:
    """Validated relaxation protocol: pancake trap scaled with T so the
    collision time stays ~10 horizontal periods; anisotropy 0.75/1.125."""
    s = T0 / 10e-6
    trap = TrapConfig(
        omega_osc=2 * math.pi * 1200 * s,
        omega_x=2 * math.pi * 95 * s,
        omega_y=2 * math.pi * 87 * s,
        depth_U0=CS.k_B * 140e-6,
    )
    T_init = (1.125 * T0, 1.125 * T0, 0.75 * T0)
    n_bar = initial_mean_density(trap, N, T_init)
    t_pred, _ = analytic_t_therm_classical(n_bar, T0)
    return ScenarioConfig(
        mode=MODE_CLASSICAL,
        trap=trap,
        N=N,
        T_init=T_init,
        schedule=(Phase("free_thermalize", 4.0 * t_pred),),
        replicas=replicas,
        seed=seed,
        name=name,
    )


def preset_fig7_sweep(**over) -> ScenarioConfig:
    trap = TrapConfig.paper_trap()
    scen = ScenarioConfig(
        mode="analytic_only",
        trap=trap,
        N=int(over.pop("N", 200000)),
        T_init=(10e-6, 10e-6, 10e-6),
        sweep={"name": "T0", "values": [t * 1e-6 for t in (4, 6, 8, 10, 12, 14, 16, 18, 20)]},
        name="fig7_sweep",
    )
    return scen.with_updates(**over) if over else scen


def preset_fig8_relax(**over) -> ScenarioConfig:
    T0 = float(over.pop("T0", 10e-6))
    scen = _classical_relax_scenario(
        T0, N=int(over.pop("N", 5000)), replicas=int(over.pop("replicas", 4)),
        name="fig8_relax",
    )
    return scen.with_updates(**over) if over else scen


def preset_freezeout_demo(**over) -> ScenarioConfig:
    """Quantized-plane relaxation swept across k_B T / hbar omega in [0.5, 3]."""
    kt_grid = over.pop("kt_over_hw", (0.5, 0.7, 1.0, 1.5, 2.0, 3.0))
    omega_osc = 2 * math.pi * 80e3
    hw_over_k = CS.hbar * omega_osc / CS.k_B
    N = int(over.pop("N", 3000))
    T_ref = 3.0 * hw_over_k
    trap = _freezeout_plane_trap(T_ref, N, omega_osc)
    scen = ScenarioConfig(
        mode=MODE_QUANTIZED,
        trap=trap,
        N=N,
        T_init=(T_ref, T_ref, 0.0),
        schedule=(Phase("free_thermalize", 1.0),),
        sweep={"name": "T0", "values": [x * hw_over_k for x in kt_grid]},
        replicas=int(over.pop("replicas", 8)),
        name="freezeout_demo",
        options={"classical_twin": True},
    )
    return scen.with_updates(**over) if over else scen


def _freezeout_plane_trap(T: float, N: int, omega_osc: float) -> TrapConfig:
    """Horizontal frequency set so one collision takes ~10 trap periods."""
    omega_h = 0.2 * CS.k_B * T / (CS.hbar * N)
    return TrapConfig(
        omega_osc=omega_osc,
        omega_x=omega_h,
        omega_y=0.92 * omega_h,
        depth_U0=CS.k_B * 140e-6,
    )


def preset_two_step_cooling(**over) -> ScenarioConfig:
    trap = TrapConfig.paper_trap(alpha=math.radians(29.0))
    scen = ScenarioConfig(
        mode="analytic_only",
        trap=trap,
        N=1,
        schedule=(
            Phase("cool", 0.5),
            Phase("rescale_alpha", 10e-3, alpha_new=math.radians(63.0)),
            Phase("cool", 0.5),
            Phase("rescale_alpha", 10e-3, alpha_new=math.radians(29.0)),
        ),
        options={"beta": 0.7},
        name="two_step_cooling",
    )
    return scen.with_updates(**over) if over else scen


def preset_sideband_steady_state(**over) -> ScenarioConfig:
    trap = TrapConfig.paper_trap()
    base = {
        "Omega_R": 2 * math.pi * 5e3,
        "Gamma_prime": 2 * math.pi * 4.8e3,
        "detuning_delta": 0.0,
        "sigma_minus_fraction": 0.0,
    }
    values = [
        {},
        {"detuning_delta": 0.15 * trap.omega_osc},
        {"sigma_minus_fraction": 0.01},
        {"Gamma_prime": 2 * math.pi * 2.4e3},
    ]
    scen = ScenarioConfig(
        mode="sideband_rate_model",
        trap=trap,
        N=1,
        rate_model=base,
        sweep={"name": "rate_model", "values": values},
        name="sideband_steady_state",
    )
    return scen.with_updates(**over) if over else scen


PRESETS = {
    "fig7_sweep": preset_fig7_sweep,
    "fig8_relax": preset_fig8_relax,
    "freezeout_demo": preset_freezeout_demo,
    "two_step_cooling": preset_two_step_cooling,
    "sideband_steady_state": preset_sideband_steady_state,
}


def preset(name: str, **over) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    return PRESETS[name](**over)
