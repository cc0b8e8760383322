from .covariance import DivergenceError, covariance_evolve, lyapunov_steady_state
from .fourier import FourierTruncation, SidebandSystem, solve_sideband
from .linear_model import LinearModel, NoiseChannel, build_rlc_linear_model
from .solution import DynamicsSolution
from .unbalanced import (
    balanced_sideband_system,
    fourier_heating_solve,
    mean_field_phasors,
    unbalanced_simulate,
)

__all__ = [
    "DivergenceError",
    "DynamicsSolution",
    "FourierTruncation",
    "LinearModel",
    "NoiseChannel",
    "SidebandSystem",
    "balanced_sideband_system",
    "build_rlc_linear_model",
    "covariance_evolve",
    "fourier_heating_solve",
    "lyapunov_steady_state",
    "mean_field_phasors",
    "solve_sideband",
    "unbalanced_simulate",
]
