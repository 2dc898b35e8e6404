"""Entanglement of two condensates through a shared quantized Bragg probe.

Gaussian (Heisenberg-picture) simulation of the five-mode system
(alpha_q, alpha_-q, beta_q, beta_-q, probe), the number and quadrature
entanglement parameters, closed-form reference results, a truncated-Fock
oracle and a Monte Carlo model of the phase-sensitive verification scheme.
"""

__version__ = "0.1.0"

from .condensate import CondensateParams, DispersionPoint, dispersion, effective_coupling, healing_length
from .model import ModeId, SystemConfig, Variant, build_dynamical_matrix, hamiltonian_quadratic_form
from .propagator import EvolutionMap, LinearOperatorForm, evolve, operator_at
from .gaussian import InitialState
from .diagnostics import ModePair, xi_number, xi_quadrature

__all__ = [
    "CondensateParams",
    "DispersionPoint",
    "EvolutionMap",
    "InitialState",
    "LinearOperatorForm",
    "ModeId",
    "ModePair",
    "SystemConfig",
    "Variant",
    "build_dynamical_matrix",
    "dispersion",
    "effective_coupling",
    "evolve",
    "hamiltonian_quadratic_form",
    "healing_length",
    "operator_at",
    "xi_number",
    "xi_quadrature",
]
