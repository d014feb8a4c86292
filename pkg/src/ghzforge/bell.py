"""Multi-setting Bell operators: construction, quantum values and sampled estimates."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np

from .errors import ContractError
from .exactnum import format_rational
from .paradox import cyclic_shift, is_ghz_vector, sigma_of, special_entry
from .qudit import LocalObservable, MonomialOperator, StateVector, apply, local_eigenbasis

__all__ = [
    "BellExpression",
    "SampleReport",
    "build_bell",
    "quantum_value",
    "sample_outcomes",
    "sample_correlations",
    "GENERATOR",
]

GENERATOR = "numpy.random.Philox"


@dataclass(frozen=True)
class BellExpression:
    n: int
    d: int
    terms: tuple[tuple[Real, MonomialOperator], ...]

    def __post_init__(self):
        terms = tuple((c, op) for c, op in self.terms)
        for c, op in terms:
            if isinstance(c, complex) or not isinstance(c, Real):
                raise ContractError(f"Bell coefficients must be real, got {c!r}")
            if op.n != self.n or op.d != self.d:
                raise ContractError(f"term {op!r} does not act on n={self.n}, d={self.d}")
        object.__setattr__(self, "terms", terms)

    @property
    def sigma(self) -> int:
        return sigma_of(self.n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "sigma": self.sigma,
            "terms": [
                {
                    "coefficient": format_rational(c) if isinstance(c, (int, Fraction)) else float(c),
                    "vector": [format_rational(r) for r in op.params],
                }
                for c, op in self.terms
            ],
        }


def build_bell(r: Sequence, d: int = 2) -> BellExpression:
    """``sum_k X(r_k) + (sigma - 1) X - X(b*1)`` for a certified qubit GHZ vector."""
    r = tuple(Fraction(x) for x in r)
    if d != 2:
        raise ContractError("the Bell operator is defined for qubits only")
    check = is_ghz_vector(r, d)
    if not check:
        raise ContractError(f"not a GHZ vector for d={d}: item {check.item}: {check.reason}")
    n = len(r)
    terms = [(1, MonomialOperator(d, cyclic_shift(r, k))) for k in range(n)]
    if sigma_of(n) == 2:
        terms.append((1, MonomialOperator(d, (Fraction(0),) * n)))
    terms.append((-1, MonomialOperator(d, (special_entry(n, d),) * n)))
    return BellExpression(n, d, tuple(terms))


def quantum_value(expr: BellExpression, psi: StateVector) -> float:
    if psi.n != expr.n or psi.d != expr.d:
        raise ContractError(f"state (n={psi.n}, d={psi.d}) does not match expression (n={expr.n}, d={expr.d})")
    total = 0.0
    for c, op in expr.terms:
        total += float(c) * float(np.vdot(psi.amplitudes, apply(op, psi).amplitudes).real)
    return total


def _measurement_probabilities(op: MonomialOperator, psi: StateVector) -> np.ndarray:
    """Joint Born probabilities of the local eigen-outcomes, shape ``(d,)*n``."""
    amp = psi.tensor()
    for j in range(op.n):
        basis = np.stack([v for _, v in local_eigenbasis(LocalObservable(op.d, op.params[j]))], axis=1)
        amp = np.moveaxis(np.tensordot(basis.conj().T, amp, axes=([1], [j])), 0, j)
    prob = np.abs(amp) ** 2
    return prob / prob.sum()


def sample_outcomes(op: MonomialOperator, psi: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Outcome exponents ``k_j`` (eigenvalue ``omega**k_j``) per shot and party.

    Parties are measured in order 1..n; each draw uses the Born probability
    conditioned on the earlier outcomes, i.e. on the collapsed state.
    """
    if shots < 1:
        raise ContractError("shots must be >= 1")
    n, d = op.n, op.d
    prob = _measurement_probabilities(op, psi)
    u = rng.random((shots, n))
    prefix = np.zeros(shots, dtype=np.int64)
    out = np.empty((shots, n), dtype=np.int64)
    for j in range(n):
        marg = prob.reshape(d**j, d, -1).sum(axis=2)  # (prefix, outcome_j)
        cum = np.cumsum(marg[prefix], axis=1)
        k = (cum <= u[:, j : j + 1] * cum[:, -1:]).sum(axis=1)
        k = np.minimum(k, d - 1)
        out[:, j] = k
        prefix = prefix * d + k
    return out


def _value_table(d: int) -> np.ndarray:
    from ._fallback import cos_table

    return cos_table(d)


@dataclass(frozen=True)
class SampleReport:
    terms: tuple[dict, ...]
    estimate: float
    stderr: float
    shots: int
    seed: int
    generator: str = GENERATOR
    partitions: tuple[int, ...] = field(default=())
    batches: tuple[dict, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "estimate": self.estimate,
            "stderr": self.stderr,
            "shots": self.shots,
            "seed": self.seed,
            "generator": self.generator,
            "partition_plan": list(self.partitions),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["term", "shot_batch", "shots", "mean", "stderr"])
            for row in self.batches:
                writer.writerow([row["term"], row["batch"], row["shots"], row["mean"], row["stderr"]])


def _stats(values: np.ndarray) -> tuple[float, float, float]:
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if values.size > 1 else 0.0
    return mean, var, math.sqrt(var / values.size)


def sample_correlations(
    expr: BellExpression,
    psi: StateVector,
    shots: int,
    seed: int,
    partitions: int = 1,
    workers: int = 1,
) -> SampleReport:
    """Monte Carlo estimate of every term and of the whole expression.

    Each term is estimated from its own ``shots`` runs. Shots are split into
    ``partitions`` batches, each with a Philox stream keyed by
    ``(seed, term, batch)``; the result depends on the partition plan but not
    on ``workers``.
    """
    if shots < 1:
        raise ContractError("shots must be >= 1")
    if psi.n != expr.n or psi.d != expr.d:
        raise ContractError("state does not match expression")
    d = expr.d
    table = _value_table(d)
    partitions = max(1, min(partitions, shots))
    sizes = [shots // partitions + (1 if p < shots % partitions else 0) for p in range(partitions)]

    def run(job):
        t, p = job
        op = expr.terms[t][1]
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, t, p])))
        k = sample_outcomes(op, psi, sizes[p], rng)
        exps = (k.sum(axis=1) + (op.global_phase.root_exponent(d) or 0)) % d
        return exps

    jobs = [(t, p) for t in range(len(expr.terms)) for p in range(partitions)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    by_job = dict(zip(jobs, results))
    term_rows, batches = [], []
    estimate, var_total = 0.0, 0.0
    for t, (c, op) in enumerate(expr.terms):
        exps = np.concatenate([by_job[(t, p)] for p in range(partitions)])
        values = table[exps]
        mean, var, se = _stats(values)
        for p in range(partitions):
            bm, _, bse = _stats(table[by_job[(t, p)]])
            batches.append({"term": t, "batch": p, "shots": sizes[p], "mean": bm, "stderr": bse})
        term_rows.append(
            {
                "index": t,
                "coefficient": float(c),
                "vector": [format_rational(r) for r in op.params],
                "mean": mean,
                "variance": var,
                "stderr": se,
                "constant": bool(np.all(exps == exps[0])),
            }
        )
        estimate += float(c) * mean
        var_total += float(c) ** 2 * se**2
    return SampleReport(
        tuple(term_rows), estimate, math.sqrt(var_total), shots, seed, GENERATOR, tuple(sizes), tuple(batches)
    )
