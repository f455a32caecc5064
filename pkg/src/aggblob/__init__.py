"""Deterministic particle method for aggregation-diffusion equations.

Solves rho_t = nu * Lap(rho^m) + div(rho * grad(W conv rho)) in one dimension
by transporting weighted particles along the negative gradient of a
regularized free energy.  Diffusion, including the degenerate m > 1 range,
is captured by mollifying the particle density inside the energy, so the
same flow handles pure aggregation (nu = 0), linear diffusion (m = 1), and
the height-constrained limit (large m).
"""

from .analysis import (
    EquilibriumReport,
    check_scaling_laws,
    classify_equilibrium,
    critical_exponent,
    dilate,
    energy_report,
    grid_entropy,
    grid_interaction,
    integrable_kernel_criticality,
)
from .density import (
    Barenblatt,
    Characteristic,
    DensitySpec,
    Grid1D,
    GridDensity,
    ParticleEnsemble,
    Superposition,
    barenblatt_params,
    barenblatt_profile,
    barenblatt_radius,
    density_from_config,
    discretize,
    max_gap,
    reconstruct,
    remesh,
)
from .dynamics import Diagnostics, Model, diagnostics, discrete_energy, velocity
from .errors import DomainError, NumericalError, StiffnessError, ValidationError
from .experiments import ExperimentConfig, run, snapshot_grid
from .integrator import IntegratorOpts, TrajectoryRecord, integrate, snapshot_times
from .kernels import (
    InteractionKernel,
    LocalizedGaussian,
    Morse,
    PowerLaw,
    RepulsiveAttractive,
    ScaledKernel,
    ScaledLog1D,
    ScaledNewtonian1D,
    ZeroKernel,
    kernel_from_config,
)
from .mollifier import Mollifier, epsilon_from_spacing
from .presets import get_preset, list_presets, preset_config, preset_names

__version__ = "0.1.0"

__all__ = [
    "Barenblatt",
    "Characteristic",
    "DensitySpec",
    "Diagnostics",
    "DomainError",
    "EquilibriumReport",
    "ExperimentConfig",
    "Grid1D",
    "GridDensity",
    "IntegratorOpts",
    "InteractionKernel",
    "LocalizedGaussian",
    "Model",
    "Mollifier",
    "Morse",
    "NumericalError",
    "ParticleEnsemble",
    "PowerLaw",
    "RepulsiveAttractive",
    "ScaledKernel",
    "ScaledLog1D",
    "ScaledNewtonian1D",
    "StiffnessError",
    "Superposition",
    "TrajectoryRecord",
    "ValidationError",
    "ZeroKernel",
    "barenblatt_params",
    "barenblatt_profile",
    "barenblatt_radius",
    "check_scaling_laws",
    "classify_equilibrium",
    "critical_exponent",
    "density_from_config",
    "diagnostics",
    "dilate",
    "discrete_energy",
    "discretize",
    "energy_report",
    "epsilon_from_spacing",
    "get_preset",
    "grid_entropy",
    "grid_interaction",
    "integrable_kernel_criticality",
    "integrate",
    "kernel_from_config",
    "list_presets",
    "max_gap",
    "preset_config",
    "preset_names",
    "reconstruct",
    "remesh",
    "run",
    "snapshot_grid",
    "snapshot_times",
    "velocity",
]
