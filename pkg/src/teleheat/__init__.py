"""Non-autonomous telegraph-type heat conduction: exact self-similar
solutions, memory-kernel fluxes, explicit finite-difference solvers and
verification experiments."""

from teleheat.core import (
    Field,
    Grid1D,
    ModelParams,
    ParameterDomainError,
    SolverConfig,
    grid_linspace,
    make_params,
    mass,
)

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Grid1D",
    "ModelParams",
    "ParameterDomainError",
    "SolverConfig",
    "grid_linspace",
    "make_params",
    "mass",
    "__version__",
]
