"""Joint MCMC inference of model inputs and forward-solver discretizations.

The package learns, from observed data alone, both the unknown input of a
forward model and the discretization (grid-point locations and count, or a
tessellation density) used to evaluate that model, by alternating a
prior-reversible update of the input with reversible-jump and relocation
updates of the discretization.
"""

from .core import (
    ChainState,
    ContractViolation,
    DensityParam,
    Field,
    FiniteVector,
    GridParam,
    NoiseModel,
    ObservationModel,
    PlanarPoint,
    SolverFailure,
    SolverStats,
    gamma_norm_sq,
    potential,
)
from .samplers import SamplerConfig, run_gibbs

__version__ = "0.1.0"

__all__ = [
    "ChainState",
    "ContractViolation",
    "DensityParam",
    "Field",
    "FiniteVector",
    "GridParam",
    "NoiseModel",
    "ObservationModel",
    "PlanarPoint",
    "SamplerConfig",
    "SolverFailure",
    "SolverStats",
    "gamma_norm_sq",
    "potential",
    "run_gibbs",
    "__version__",
]
