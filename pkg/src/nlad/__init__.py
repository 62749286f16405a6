"""Bifurcation toolkit for a two-species nonlocal advection-diffusion system.

The package covers the full desk-scale analysis pipeline: linear stability
of the homogeneous state, amplitude-equation coefficients and analytic
pattern branches near onset, direct pseudo-spectral simulation on the
periodic domain, and parameter-swept bifurcation diagrams with hysteresis
detection.
"""
from ._version import __version__
from .continuation import (
    BranchPoint,
    Diagram,
    ModulationClass,
    build_diagram,
    classify_modulation,
    default_gamma_grid,
    sweep,
    trace_diagram,
)
from .linear_stability import (
    CriticalMode,
    DispersionPoint,
    NeverDestabilizedError,
    critical_mode,
    default_m_max,
    dispersion,
    instability_thresholds,
)
from .model import (
    DimensionalParams,
    Kernel,
    ModelParams,
    fourier_coefficient,
    nondimensionalize,
)
from .spectral import (
    BlowUpError,
    SimulationResult,
    SolverConfig,
    StateGrid,
    default_initial_state,
    mode1_energy_fraction,
    mode_amplitude,
    mode_energies,
    phase_correlation,
    rhs,
    run,
    step,
)
from .weakly_nonlinear import (
    AnalyticBranch,
    BifurcationClass,
    SecondHarmonicResonanceError,
    WnlCoefficients,
    analytic_branch,
    classify,
    stability_coefficient_tophat,
    wnl_coefficients,
    wnl_profile,
    zero_mode_growth_rates,
)

__all__ = [
    "__version__",
    "AnalyticBranch",
    "BifurcationClass",
    "BlowUpError",
    "BranchPoint",
    "CriticalMode",
    "Diagram",
    "DimensionalParams",
    "DispersionPoint",
    "Kernel",
    "ModelParams",
    "ModulationClass",
    "NeverDestabilizedError",
    "SecondHarmonicResonanceError",
    "SimulationResult",
    "SolverConfig",
    "StateGrid",
    "WnlCoefficients",
    "analytic_branch",
    "build_diagram",
    "classify",
    "classify_modulation",
    "critical_mode",
    "default_gamma_grid",
    "default_initial_state",
    "default_m_max",
    "dispersion",
    "fourier_coefficient",
    "instability_thresholds",
    "mode1_energy_fraction",
    "mode_amplitude",
    "mode_energies",
    "nondimensionalize",
    "phase_correlation",
    "rhs",
    "run",
    "step",
    "stability_coefficient_tophat",
    "sweep",
    "trace_diagram",
    "wnl_coefficients",
    "wnl_profile",
    "zero_mode_growth_rates",
]
