"""Energy-based controllability of network systems.

Controllability Gramians, centrality-driven upper bounds on their smallest
eigenvalue, Cheeger-type spectral-gap bounds and seeded random-graph
experiments.
"""
from .errors import (
    BudgetExceededError,
    ConvergenceError,
    DegenerateSpectrumError,
    NetGramianError,
    PreconditionError,
    SizeError,
    StructuralError,
    UncontrollableError,
)
from .gramian import ControlSystem, GramianResult, gramian, lambda_metric, min_energy_input, theorem1_bound
from .matrix_core import is_irreducible, is_pattern_primitive, spectral_norm, stability_report
from .spectral import SpectralData, leading_eigenpair

__version__ = "0.1.0"
