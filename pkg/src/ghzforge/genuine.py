"""Genuine n-partite check: no party subset with an observable subset forms a paradox.

For every party subset ``beta`` (2 <= |beta| < n) and observable subset
``alpha`` the restricted observables are screened in increasing cost:

1. once-only filter: a local observable used by exactly one member of
   ``alpha`` leaves its constraint free, so such an ``alpha`` cannot be a
   minimal paradox;
2. exact commutation screen: two monomials with ``AB = c BA`` for a scalar
   ``c != 1`` share no eigenvector;
3. numeric joint-eigenspace refinement; every joint eigenvalue tuple becomes a
   candidate target list and is tested by exhaustive LHV search.

A candidate whose targets admit no local assignment is a sub-paradox and
makes the instance non-genuine.
"""
from __future__ import annotations

import functools
import itertools
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import config
from .errors import ConsistencyError, ContractError, ResourceError
from .exactnum import Phase, format_rational
from .lhv import lhv_search
from .paradox import ParadoxInstance
from .qudit import MonomialOperator, StateVector, eigen_relation, operator_product

__all__ = [
    "SubsetCandidate",
    "Rejection",
    "Witness",
    "GenuinenessVerdict",
    "pair_map",
    "restrict",
    "commutation_phase",
    "joint_eigenspaces",
    "common_eigenstate",
    "genuineness_check",
    "verify_witness",
]


def pair_map(j: int, k: int, n: int, sigma: int) -> int:
    """The other shift index whose vector carries the same entry at party ``j``.

    Positions ``p`` and ``n + sigma + 1 - p`` of the base vector hold the same
    value, and the k-shift shows position ``j - k`` at party ``j``; hence
    ``k' = 2j - sigma - 1 - k (mod n)``.
    """
    if not 1 <= j <= n or not 0 <= k < n:
        raise ContractError(f"indices out of range: j={j}, k={k}, n={n}")
    if sigma not in (1, 2):
        raise ContractError(f"sigma must be 1 or 2, got {sigma}")
    return (2 * j - sigma - 1 - k) % n


@dataclass(frozen=True)
class SubsetCandidate:
    beta: tuple[int, ...]  # parties, 1-based
    alpha: tuple[int, ...]  # observable indices, 0-based
    operators: tuple[MonomialOperator, ...]


@dataclass(frozen=True)
class Rejection:
    beta: tuple[int, ...]
    alpha: tuple[int, ...]
    party: int
    setting: Fraction

    def __bool__(self) -> bool:
        return False


def restrict(inst: ParadoxInstance, beta: Sequence[int], alpha: Sequence[int]) -> SubsetCandidate | Rejection:
    beta, alpha = tuple(beta), tuple(alpha)
    if not 2 <= len(beta) < inst.n:
        raise ContractError(f"need 2 <= |beta| < n={inst.n}, got {beta}")
    if not alpha:
        raise ContractError("alpha must be nonempty")
    ops = [inst.observables[i] for i in alpha]
    for j in beta:
        counts = Counter(op.params[j - 1] for op in ops)
        for y in sorted(counts):
            if counts[y] == 1:
                return Rejection(beta, alpha, j, y)
    return SubsetCandidate(beta, alpha, tuple(op.restrict(beta) for op in ops))


def commutation_phase(a, b) -> Phase | None:
    """Scalar ``c`` with ``a @ b = exp(2j*pi*c) * b @ a``, or None if the ratio is not scalar."""
    ab, ba = operator_product(a, b), operator_product(b, a)
    if ab.shifts != ba.shifts:
        return None
    c = ab.global_phase - ba.global_phase
    for fa, fb in zip(ab.factors, ba.factors):
        diffs = {pa - pb for pa, pb in zip(fa.phases, fb.phases)}
        if len(diffs) != 1:
            return None
        c = c + diffs.pop()
    return c


# --------------------------------------------------------------------------
# common eigenstates


@functools.lru_cache(maxsize=4096)
def _dense(op) -> np.ndarray:
    return op.dense()


def _as_matrix(op) -> np.ndarray:
    return op if isinstance(op, np.ndarray) else _dense(op)


def _candidate_eigenvalues(op, mat: np.ndarray, cluster_tol: float) -> list[complex]:
    if isinstance(op, MonomialOperator):
        # X(r)**d = exp(2j*pi*d*g): the spectrum lies on the d-th roots times exp(2j*pi*g)
        g = float(op.global_phase.value)
        return [np.exp(2j * np.pi * (k / op.d + g)) for k in range(op.d)]
    reps: list[complex] = []
    for lam in np.linalg.eigvals(mat):
        if all(abs(lam - r) > cluster_tol for r in reps):
            reps.append(lam / abs(lam))
    return reps


def joint_eigenspaces(
    ops: Sequence, tol: float = config.EIGEN_TOL, cluster_tol: float = config.CLUSTER_TOL
) -> list[tuple[np.ndarray, tuple[complex, ...]]]:
    """All joint eigenspaces as ``(orthonormal basis, eigenvalues)`` pairs.

    Refinement: start from the whole space; for each operator ``U`` and each
    candidate eigenvalue ``lam``, the part of a current subspace ``Q`` that
    ``U`` maps to ``lam`` times itself is the null space of ``(U - lam) Q``.
    Singular values <= tol are the accepted full-space residuals.
    """
    if tol <= 0:
        raise ContractError("tolerance must be positive")
    mats = [_as_matrix(op) for op in ops]
    if not mats:
        raise ContractError("need at least one operator")
    dim = mats[0].shape[0]
    if dim > config.ORACLE_DIM_LIMIT:
        raise ResourceError(f"oracle dimension {dim} exceeds {config.ORACLE_DIM_LIMIT}")
    for m in mats:
        if m.shape != (dim, dim):
            raise ContractError("operators must act on the same space")
        if np.linalg.norm(m.conj().T @ m - np.eye(dim)) > config.UNITARY_TOL:
            raise ContractError("operator is not unitary")
    leaves = [(np.eye(dim, dtype=complex), ())]
    for op, U in zip(ops, mats):
        refined = []
        for lam in _candidate_eigenvalues(op, U, cluster_tol):
            for Q, lams in leaves:
                M = U @ Q - lam * Q
                _, s, vh = np.linalg.svd(M, full_matrices=True)
                sv = np.zeros(Q.shape[1])
                sv[: s.size] = s
                null = vh[sv <= tol].conj().T
                if null.shape[1]:
                    refined.append((Q @ null, lams + (complex(lam),)))
        leaves = refined
        if not leaves:
            return []
    leaves.sort(key=lambda leaf: [np.angle(x) % (2 * np.pi) for x in leaf[1]])
    for Q, lams in leaves:
        v = Q[:, 0]
        worst = max(np.linalg.norm(U @ v - lam * v) for U, lam in zip(mats, lams))
        if worst > tol * 10:
            raise ConsistencyError(f"joint eigenvector residual {worst:.2e} exceeds tolerance")
    return leaves


def common_eigenstate(
    ops: Sequence, tol: float = config.EIGEN_TOL
) -> tuple[np.ndarray, tuple[complex, ...]] | None:
    """A unit vector that is an eigenvector of every operator, with its eigenvalues."""
    leaves = joint_eigenspaces(ops, tol)
    if not leaves:
        return None
    Q, lams = leaves[0]
    return Q[:, 0], lams


def _snap(lam: complex, d: int) -> Phase | None:
    turns = (np.angle(lam) / (2 * np.pi)) % 1.0
    k = round(turns * d)
    if abs(turns * d - k) > 1e-6:
        return None
    return Phase(Fraction(k % d, d))


# --------------------------------------------------------------------------
# the sweep


@dataclass(frozen=True)
class Witness:
    beta: tuple[int, ...]
    alpha: tuple[int, ...]
    instance: ParadoxInstance
    state: StateVector

    @property
    def eigenvalues(self) -> tuple[Phase, ...]:
        return self.instance.targets

    def to_dict(self) -> dict:
        return {
            "beta": list(self.beta),
            "alpha": list(self.alpha),
            "eigenvalues": [format_rational(t.value) for t in self.instance.targets],
            "instance": self.instance.to_dict(),
            "state": self.state.to_dict(),
        }


@dataclass(frozen=True)
class GenuinenessVerdict:
    genuine: bool
    witness: Witness | None
    candidates_checked: int
    oracle_calls: int
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "genuine": self.genuine,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "candidates_checked": self.candidates_checked,
            "oracle_calls": self.oracle_calls,
            "stats": dict(self.stats),
        }


def verify_witness(w: Witness, tol: float = config.EIGEN_TOL) -> bool:
    """Re-check a witness from scratch: shared eigenstate and zero LHV models."""
    for op, t in zip(w.instance.observables, w.instance.targets):
        if eigen_relation(op, w.state, tol) != t:
            return False
    return lhv_search(w.instance).count == 0


def _candidate_order(n: int, m: int):
    for size in range(2, n):
        for beta in itertools.combinations(range(1, n + 1), size):
            for k in range(1, m + 1):
                for alpha in itertools.combinations(range(m), k):
                    yield beta, alpha


def genuineness_check(
    inst: ParadoxInstance,
    tol: float = config.EIGEN_TOL,
    budgets: config.Budgets | None = None,
    lhv_budget: int | None = None,
) -> GenuinenessVerdict:
    """Full sweep over party subsets and observable subsets.

    Candidates are visited by party-subset size, then lexicographically; the
    first sub-paradox found is returned as the witness.
    """
    budgets = budgets or config.Budgets()
    n, d, m = inst.n, inst.d, len(inst)
    if n > budgets.sweep:
        raise ResourceError(f"n={n} exceeds the sweep party limit {budgets.sweep}")
    if d ** (n - 1) > config.ORACLE_DIM_LIMIT:
        raise ResourceError(f"restricted dimension {d ** (n - 1)} exceeds {config.ORACLE_DIM_LIMIT}")
    n_candidates = sum(
        len(list(itertools.combinations(range(n), size))) * (2**m - 1) for size in range(2, n)
    )
    if n_candidates > budgets.candidates:
        raise ResourceError(f"{n_candidates} candidates exceed the sweep candidate limit {budgets.candidates}")

    t0 = time.perf_counter()
    stats = Counter()
    oracle_calls = 0
    checked = 0
    comm_cache: dict[tuple, bool] = {}

    def commute(beta, a, b):
        key = (beta, a, b)
        if key not in comm_cache:
            c = commutation_phase(inst.observables[a].restrict(beta), inst.observables[b].restrict(beta))
            comm_cache[key] = c is None or not c
        return comm_cache[key]

    for beta, alpha in _candidate_order(n, m):
        checked += 1
        cand = restrict(inst, beta, alpha)
        if not cand:
            stats["once_only"] += 1
            continue
        if not all(commute(beta, a, b) for a, b in itertools.combinations(alpha, 2)):
            stats["anticommuting"] += 1
            continue
        oracle_calls += 1
        leaves = joint_eigenspaces(cand.operators, tol)
        if not leaves:
            stats["no_common_eigenstate"] += 1
            continue
        for Q, lams in leaves:
            targets = [_snap(lam, d) for lam in lams]
            if any(t is None for t in targets):
                raise ConsistencyError(f"eigenvalue off the omega grid for beta={beta}, alpha={alpha}")
            sub = ParadoxInstance(len(beta), d, cand.operators, tuple(targets), certified=False, family="restricted")
            stats["lhv_searches"] += 1
            if lhv_search(sub, budget=lhv_budget, stop_at_first=True).satisfiable:
                continue
            state = StateVector(len(beta), d, Q[:, 0])
            witness = Witness(beta, alpha, sub, state)
            stats["wall_ms"] = (time.perf_counter() - t0) * 1e3
            return GenuinenessVerdict(False, witness, checked, oracle_calls, dict(stats))
        stats["lhv_satisfiable"] += 1
    stats["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return GenuinenessVerdict(True, None, checked, oracle_calls, dict(stats))
