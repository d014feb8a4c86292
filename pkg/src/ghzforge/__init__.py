"""Multi-setting GHZ paradoxes for n qudits: construction, verification,
hidden-variable refutation, genuineness checks and Bell-operator simulation."""
__version__ = "0.1.0"

from .errors import ConsistencyError, ContractError, DomainError, GhzError, ParseError, ResourceError
from .exactnum import Phase, Rational, format_rational, parse_rational
from .paradox import (
    ParadoxInstance,
    is_ghz_vector,
    mermin_embedded_instance,
    mermin_instance,
    theorem1_instance,
    theorem2_vector,
    three_setting_vector,
)
from .qudit import LocalObservable, MonomialOperator, StateVector, apply, eigen_relation, ghz_state

__all__ = [
    "__version__",
    "GhzError",
    "ContractError",
    "DomainError",
    "ResourceError",
    "ParseError",
    "ConsistencyError",
    "Phase",
    "Rational",
    "format_rational",
    "parse_rational",
    "ParadoxInstance",
    "is_ghz_vector",
    "mermin_instance",
    "mermin_embedded_instance",
    "theorem1_instance",
    "theorem2_vector",
    "three_setting_vector",
    "LocalObservable",
    "MonomialOperator",
    "StateVector",
    "apply",
    "eigen_relation",
    "ghz_state",
]
