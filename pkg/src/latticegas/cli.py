"""Command-line entry points.

Verbs: run a scenario file, expand and run a named preset, validate a
scenario, or evaluate one of the closed-form oracles directly. Exit
codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .constants import CS
from .core import (
    TrapConfig,
    ground_state_size,
    lamb_dicke,
    loss_rate_scaling,
    rabi_frequency,
    temperature_from_ground_fraction,
)
from .errors import ConfigError, LatticeGasError
from .kinetics import (
    analytic_t_therm_classical,
    analytic_t_therm_quasi2d,
    collision_rate_2d,
    cross_section,
    dEz_dt,
    delta_Ez,
    suppression_factor,
)
from .analysis import phase_space_density
from .harness import PRESETS, ScenarioConfig, load_scenario, preset, run

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _oracle_registry():
    from dataclasses import replace

    def paper_rabi(alpha_deg=20.0, depth_uK=140.0):
        trap = TrapConfig.paper_trap(alpha=math.radians(alpha_deg))
        trap = replace(trap, depth_U0=CS.k_B * depth_uK * 1e-6)
        return rabi_frequency(trap) / (2 * math.pi)

    return {
        "lamb_dicke": lambda omega_osc=2 * math.pi * 80e3:
            math.sqrt(CS.omega_recoil / omega_osc),
        "ground_state_size": lambda omega_osc: ground_state_size(omega_osc),
        "cross_section": lambda v_rel: cross_section(v_rel),
        "t_therm_classical": lambda n_bar, T0: analytic_t_therm_classical(n_bar, T0)[0],
        "observable_classical": lambda T0: analytic_t_therm_classical(1.0, T0)[1],
        "t_therm_quasi2d": lambda n_2d, T, omega_osc=2 * math.pi * 80e3:
            analytic_t_therm_quasi2d(n_2d, T, omega_osc),
        "suppression_factor": lambda T, omega_osc=2 * math.pi * 80e3:
            suppression_factor(T, omega_osc),
        "collision_rate_2d": lambda n_2d: collision_rate_2d(n_2d),
        "dEz_dt": lambda n_2d, T, omega_osc=2 * math.pi * 80e3: dEz_dt(n_2d, T, omega_osc),
        "delta_Ez": lambda T, omega_osc=2 * math.pi * 80e3: delta_Ez(T, omega_osc),
        "phase_space_density": lambda n_peak, T: phase_space_density(n_peak, T),
        "loss_rate_scaling": lambda U_ref, K_ref, U_new: loss_rate_scaling(U_ref, K_ref, U_new),
        "temperature_from_ground_fraction": lambda p0, omega=2 * math.pi * 80e3:
            temperature_from_ground_fraction(p0, omega),
        "paper_rabi_kHz": lambda alpha_deg=20.0, depth_uK=140.0:
            paper_rabi(alpha_deg, depth_uK) / 1e3,
    }


def _parse_kv(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"argument {item!r} is not key=value")
        key, val = item.split("=", 1)
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def _apply_overrides(d: dict, overrides: dict):
    for dotted, value in overrides.items():
        node = d
        parts = dotted.split(".")
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise ConfigError(f"override path {dotted!r} not found")
            node = node[p]
        node[parts[-1]] = value
    return d


def build_parser():
    ap = argparse.ArgumentParser(prog="latticegas",
                                 description="confined-gas kinetics toolkit")
    sub = ap.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario")
    p_preset = sub.add_parser("preset", help="run a named preset")
    p_preset.add_argument("name", choices=sorted(PRESETS))
    for p in (p_run, p_preset):
        p.add_argument("--override", action="append", default=[],
                       help="dotted key=value applied to the scenario")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--replicas", type=int, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out-dir", default="runs")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario")

    p_or = sub.add_parser("oracle", help="evaluate a closed-form quantity")
    p_or.add_argument("name", choices=sorted(_oracle_registry()))
    p_or.add_argument("args", nargs="*", help="key=value arguments")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        if ns.verb == "validate":
            load_scenario(ns.scenario)
            print("ok")
            return EXIT_OK
        if ns.verb == "oracle":
            fn = _oracle_registry()[ns.name]
            value = fn(**_parse_kv(ns.args))
            print(format(float(value), ".12g"))
            return EXIT_OK
        if ns.verb == "run":
            scen = load_scenario(ns.scenario)
        else:
            scen = preset(ns.name)
        over = _parse_kv(ns.override)
        if over:
            scen = ScenarioConfig.from_dict(_apply_overrides(scen.to_dict(), over))
        if ns.seed is not None:
            scen = scen.with_updates(seed=ns.seed)
        if ns.replicas is not None:
            scen = scen.with_updates(replicas=ns.replicas)
        manifest = run(scen, ns.out_dir, workers=ns.workers)
        print(json.dumps({"config_hash": manifest.config_hash,
                          "outputs": manifest.outputs}, indent=2))
        return EXIT_OK
    except ConfigError as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except LatticeGasError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
