"""Dominating sets of Knödel graphs: constructions, certificates and an exact oracle."""
from kgdom.errors import (
    GraphError, KnodelError, NumberTheoryError, PreconditionError, PreconditionFailure,
    VerificationError,
)
from kgdom.knodel import KnodelGraph, VertexSet, build
from kgdom.verify import BoundReport, Certificate, certify
from kgdom.construct import best_bound, construct_thm1, construct_thm2
from kgdom.exact import Budget, Inconclusive, SolveResult, exact_gamma

__version__ = "0.1.0"
