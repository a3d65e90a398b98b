"""Delayed wild/sterile/non-sterile mosquito suppression model toolkit.

Simulation (fixed-step method of steps with dense output), equilibrium
location, crossing/Hopf analysis of the characteristic quasi-polynomial, and
one-parameter bifurcation scans, with a command-line front end.
"""

from ._kernels import backend_name, using_numba
from .dde import Trajectory, constant_history, default_step, integrate, integrate_generic, sample
from .equilibria import (
    EquilibriumReport,
    boundary_equilibrium,
    equilibrium_from_total,
    h_of_n,
    positive_equilibria,
    trivial_equilibrium,
)
from .linearization import (
    CoefficientSet,
    DeltaSet,
    JacobianPair,
    delta_coefficients,
    expansion_coefficients,
    jacobians,
)
from .model import ModelParams, OmegaBox, State, in_omega, omega_box, rhs
from .scan import ScanConfig, ScanResult, classify_samples, extrema, scan
from .spectral import (
    BoundarySpectrum,
    Crossing,
    GammaSet,
    SpectralReport,
    analyze,
    boundary_spectrum,
    critical_delays,
    crossing_frequencies,
    crossing_trig,
    gamma_coefficients,
    lemma_conditions,
    quasipoly_residual,
    routh_hurwitz,
    transversality,
)

__version__ = "0.1.0"

__all__ = [
    "BoundarySpectrum",
    "CoefficientSet",
    "Crossing",
    "DeltaSet",
    "EquilibriumReport",
    "GammaSet",
    "JacobianPair",
    "ModelParams",
    "OmegaBox",
    "ScanConfig",
    "ScanResult",
    "SpectralReport",
    "State",
    "Trajectory",
    "analyze",
    "backend_name",
    "boundary_equilibrium",
    "boundary_spectrum",
    "classify_samples",
    "constant_history",
    "critical_delays",
    "crossing_frequencies",
    "crossing_trig",
    "default_step",
    "delta_coefficients",
    "equilibrium_from_total",
    "expansion_coefficients",
    "extrema",
    "gamma_coefficients",
    "h_of_n",
    "in_omega",
    "integrate",
    "integrate_generic",
    "jacobians",
    "lemma_conditions",
    "omega_box",
    "positive_equilibria",
    "quasipoly_residual",
    "rhs",
    "routh_hurwitz",
    "sample",
    "scan",
    "transversality",
    "trivial_equilibrium",
    "using_numba",
]
