"""Kinetics of a cesium gas strongly confined in one dimension.

Sideband-cooling rate equations, a DSMC collision engine for classical
and quasi-2D regimes, closed-form thermalization oracles, and a batch
harness that renders every comparison as deterministic CSV tables.
"""

from .constants import CS, Constants
from .core import (
    TrapConfig,
    ThermalState,
    lamb_dicke,
    ground_state_size,
    raman_coupling,
    rabi_frequency,
    coupling_parity,
    rescale_frequencies,
    two_step_final_temperature,
    thermal_state,
    temperature_from_ground_fraction,
    temperature_from_mean_n,
    loss_rate_scaling,
)
from .kinetics import (
    cross_section,
    analytic_t_therm_classical,
    analytic_t_therm_quasi2d,
    suppression_factor,
    collision_rate_2d,
    energy_distribution_2d,
    dEz_dt,
    delta_Ez,
    mean_density,
)
from .sideband import (
    RateModelConfig,
    PopulationVector,
    build_rate_matrix,
    steady_state,
    cooling_rate,
    evolve,
    thermal_rabi_signal,
)
from .dsmc import (
    GasState,
    Particle,
    ThermalizationResult,
    sample_thermal,
    advance_free,
    collide_classical,
    collide_quantized,
    run_relaxation,
)
from .analysis import (
    TimeSeries,
    FitResult,
    fit_exponential,
    kinetic_invariant,
    phase_space_density,
    temperature_estimators,
)

__version__ = "0.1.0"
