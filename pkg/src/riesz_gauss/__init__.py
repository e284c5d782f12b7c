"""Riesz-kernel potential theory on point grids.

Closed sets are sampled into :class:`DiscretizedSet` point clouds, the kernel
``|x - y|^(alpha - n)`` is assembled with a regularised diagonal, and the
equilibrium, balayage and Gauss problems are solved as convex quadratic
programs over nonnegative weights.
"""

from .errors import (
    AssemblyError,
    ConfigurationError,
    DomainError,
    PreconditionError,
    ResourceError,
    RieszError,
    SolverError,
)
from .geometry import DiscretizedSet, build_set, invert_set, parse_shape, shell_decompose
from .kernel import EnergyContext, RieszParams, assemble, energy, potential
from .measures import DiracMeasure, DiscreteMeasure
from .qp import QpOptions, QpProblem, QpSolution, oracle_solve, solve

__version__ = "0.1.0"

__all__ = [
    "AssemblyError", "ConfigurationError", "DiracMeasure", "DiscreteMeasure", "DiscretizedSet",
    "DomainError", "EnergyContext", "PreconditionError", "QpOptions", "QpProblem", "QpSolution",
    "ResourceError", "RieszError", "RieszParams", "SolverError", "assemble", "build_set", "energy",
    "invert_set", "oracle_solve", "parse_shape", "potential", "shell_decompose", "solve",
]
