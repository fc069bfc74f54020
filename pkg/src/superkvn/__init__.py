"""Exact supernumber algebra and numerics for classical mechanics on supertime."""

from . import kernels
from .errors import (AlgebraMismatch, CausticError, DimensionMismatch, IntegrationFailure, NoInverse,
                     NoSolutionBranch, NotNilpotent, RegulatorRequired, SingularOddBlock, SuperKvNError,
                     SupportEscape, UnknownGenerator)
from .extended import (ExtendedPoint, ExtendedSpace, build_charge, build_superhamiltonian,
                       equation_of_motion_rhs, extended_flow, extended_poisson_bracket)
from .grassmann import GrassmannAlgebra, Supernumber, berezin_integrate, body_soul, invert, multiply
from .kvn import (GridSpec, KvNWave, cpi_kernel_compose, density_consistency, evolve_density, evolve_form,
                  evolve_wave)
from .path_integral import (DiscretizedAction, QuadraticPotential, kernel_compare, kernel_convergence,
                            mehler_oracle, qpi_kernel_quadratic)
from .phase_flow import HamiltonianSystem, PolynomialObservable, hamilton_flow, liouvillian_coefficients, poisson_bracket
from .superfield import (build_superfield, compose_observable, dequantize_action, lagrangian_identity_check,
                         superfield_bracket_check, surface_term_cancellation, susy_conjugation)
from .supergeometry import SuperMatrix, metric_from_vierbein, osp_invariant, superdeterminant, supertime_algebra
from .vierbein import (VierbeinParams, action_from_vierbein, classical_metric_family, solve_classical,
                       solve_quantum)

__version__ = "0.1.0"
BACKEND = kernels.BACKEND

__all__ = [
    "AlgebraMismatch", "BACKEND", "CausticError", "DimensionMismatch", "DiscretizedAction", "ExtendedPoint",
    "ExtendedSpace", "GrassmannAlgebra", "GridSpec", "HamiltonianSystem", "IntegrationFailure", "KvNWave",
    "NoInverse", "NoSolutionBranch", "NotNilpotent", "PolynomialObservable", "QuadraticPotential",
    "RegulatorRequired", "SingularOddBlock", "SuperKvNError", "SuperMatrix", "Supernumber", "SupportEscape",
    "UnknownGenerator", "VierbeinParams", "action_from_vierbein", "berezin_integrate", "body_soul",
    "build_charge", "build_superfield", "build_superhamiltonian", "classical_metric_family",
    "compose_observable", "cpi_kernel_compose", "density_consistency", "dequantize_action",
    "equation_of_motion_rhs", "evolve_density", "evolve_form", "evolve_wave", "extended_flow",
    "extended_poisson_bracket", "hamilton_flow", "invert", "kernel_compare", "kernel_convergence", "kernels",
    "lagrangian_identity_check", "liouvillian_coefficients", "mehler_oracle", "metric_from_vierbein",
    "multiply", "osp_invariant", "poisson_bracket", "qpi_kernel_quadratic", "solve_classical", "solve_quantum",
    "superdeterminant", "superfield_bracket_check", "supertime_algebra", "surface_term_cancellation",
    "susy_conjugation",
]
