"""Default budgets and tolerances, with ``GHZFORGE_*`` environment overrides."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace

from .errors import ContractError

ENV_PREFIX = "GHZFORGE_"

# enumeration states for exhaustive LHV search / classical maximization
ENUMERATION_BUDGET = 2**28
# amplitudes in a dense state vector
MEMORY_BUDGET = 2**24
# largest party count for the genuineness sweep
SWEEP_PARTY_LIMIT = 8
SWEEP_CANDIDATE_LIMIT = 2**22
# largest Hilbert-space dimension handed to the common-eigenstate oracle
ORACLE_DIM_LIMIT = 4096
# dense cross-checks are only allowed up to this dimension
DENSE_CHECK_DIM_LIMIT = 256

EIGEN_TOL = 1e-10
CLUSTER_TOL = 1e-8
UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class Budgets:
    enumeration: int = ENUMERATION_BUDGET
    memory: int = MEMORY_BUDGET
    sweep: int = SWEEP_PARTY_LIMIT
    candidates: int = SWEEP_CANDIDATE_LIMIT

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value <= 0:
                raise ValueError(f"budget {name} must be positive, got {value}")


@dataclass(frozen=True)
class RunConfig:
    command: str = ""
    n: int | None = None
    d: int = 2
    family: str = "theorem2"
    input: str | None = None
    output: str | None = None
    budgets: Budgets = field(default_factory=Budgets)
    tol: float = EIGEN_TOL
    seed: int = 0
    shots: int = 100_000
    workers: int = 1
    dense_check: bool = False
    force: bool = False
    csv: str | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_ENV_FIELDS = {
    "N": ("n", int),
    "D": ("d", int),
    "FAMILY": ("family", str),
    "TOL": ("tol", float),
    "SEED": ("seed", int),
    "SHOTS": ("shots", int),
    "WORKERS": ("workers", int),
    "BUDGET": ("budgets.enumeration", int),
    "MEMORY_BUDGET": ("budgets.memory", int),
    "SWEEP_LIMIT": ("budgets.sweep", int),
}


def env_overrides(environ=None) -> dict:
    """Read ``GHZFORGE_<NAME>`` variables into a flat ``{field: value}`` dict."""
    environ = os.environ if environ is None else environ
    out = {}
    for suffix, (name, cast) in _ENV_FIELDS.items():
        raw = environ.get(ENV_PREFIX + suffix)
        if raw is not None and raw != "":
            try:
                out[name] = cast(raw)
            except ValueError:
                raise ContractError(f"{ENV_PREFIX + suffix}={raw!r} is not a valid {cast.__name__}") from None
    return out


def apply_overrides(cfg: RunConfig, values: dict) -> RunConfig:
    top, budget = {}, {}
    for key, value in values.items():
        if key.startswith("budgets."):
            budget[key.split(".", 1)[1]] = value
        else:
            top[key] = value
    if budget:
        top["budgets"] = replace(cfg.budgets, **budget)
    return replace(cfg, **top)
