"""Two qubits in local and collective thermal reservoirs: resonance
dynamics, decoherence/thermalization rates, concurrence trajectories and
rigorous entanglement death/survival time bounds."""

__version__ = "0.1.0"

from .dynamics import (
    ClusterSet,
    DensityMatrix,
    Propagator,
    alpha_closed_form,
    amplitude,
    cluster_label,
    cluster_sets,
    evolve,
    gibbs_state,
    populations_closed_form,
    same_cluster,
)
from .entanglement import (
    ConcurrenceReport,
    InitialStateParams,
    TimeBounds,
    calibrate_constants,
    concurrence,
    death_time_bound,
    initial_state,
    numerical_death_time,
    survival_time_bound,
    time_bounds,
    xi_matrix,
)
from .errors import (
    ConfigError,
    DegeneracyError,
    DomainError,
    NumericError,
    PreconditionError,
    QuadratureError,
    ResqError,
    WeakCouplingWarning,
)
from .resonance import (
    BohrEnergy,
    LevelShiftOperator,
    ModelConfig,
    RateReport,
    ResonanceDatum,
    ResonanceTable,
    bohr_energies,
    build_level_shift,
    davies_generator,
    rates,
    resonance_data,
    resonance_table,
)
from .spectral import FormFactor, SpectralValue, pv_r, pv_rg, r_prime, sigma, sigma_pm

__all__ = [
    "BohrEnergy",
    "ClusterSet",
    "ConcurrenceReport",
    "ConfigError",
    "DegeneracyError",
    "DensityMatrix",
    "DomainError",
    "FormFactor",
    "InitialStateParams",
    "LevelShiftOperator",
    "ModelConfig",
    "NumericError",
    "PreconditionError",
    "Propagator",
    "QuadratureError",
    "RateReport",
    "ResonanceDatum",
    "ResonanceTable",
    "ResqError",
    "SpectralValue",
    "TimeBounds",
    "WeakCouplingWarning",
    "alpha_closed_form",
    "amplitude",
    "bohr_energies",
    "build_level_shift",
    "calibrate_constants",
    "cluster_label",
    "cluster_sets",
    "concurrence",
    "davies_generator",
    "death_time_bound",
    "evolve",
    "gibbs_state",
    "initial_state",
    "numerical_death_time",
    "populations_closed_form",
    "pv_r",
    "pv_rg",
    "r_prime",
    "rates",
    "resonance_data",
    "resonance_table",
    "same_cluster",
    "sigma",
    "sigma_pm",
    "survival_time_bound",
    "time_bounds",
    "xi_matrix",
]
