"""Local-hidden-variable refutation.

A deterministic local model assigns every (party, setting) pair an outcome
exponent ``a`` in Z_d, i.e. a realistic value ``omega**a``. An observable's
predicted value is the product of its parties' realistic values, so every
check below is integer arithmetic mod d.

Assignments are enumerated as a single base-d counter over the variables
ordered by (party, setting ascending); the first variable is the most
significant digit, so the first witness found is the lexicographically
smallest one.
"""
from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import config, kernels
from .errors import ContractError, ResourceError
from .exactnum import Phase, format_rational
from .paradox import ParadoxInstance

__all__ = [
    "Variables",
    "LHVAssignment",
    "LHVResult",
    "ParityCertificate",
    "ClassicalBound",
    "parity_certificate",
    "lhv_search",
    "satisfies",
    "classical_bound",
    "classical_bound_exhaustive",
    "refutation_report",
]


@dataclass(frozen=True)
class Variables:
    """Ordered (party, setting) pairs and the constraint matrix over them."""

    keys: tuple[tuple[int, Fraction], ...]
    coef: np.ndarray  # (constraints x variables) occurrence counts

    @classmethod
    def from_operators(cls, ops: Sequence) -> Variables:
        if not ops:
            raise ContractError("need at least one observable")
        n = ops[0].n
        keys = sorted({(j + 1, op.params[j]) for op in ops for j in range(n)})
        index = {key: i for i, key in enumerate(keys)}
        coef = np.zeros((len(ops), len(keys)), dtype=np.int64)
        for o, op in enumerate(ops):
            for j in range(n):
                coef[o, index[(j + 1, op.params[j])]] += 1
        return cls(tuple(keys), coef)

    def __len__(self) -> int:
        return len(self.keys)

    def decode(self, counter: int, d: int) -> tuple[int, ...]:
        digits = []
        for _ in self.keys:
            counter, a = divmod(counter, d)
            digits.append(a)
        return tuple(reversed(digits))


def _required_exponents(ops, targets, d: int) -> np.ndarray:
    out = []
    for op, t in zip(ops, targets):
        k = (Phase.of(t) - op.global_phase).root_exponent(d)
        if k is None:
            raise ContractError(f"target {t} of {op!r} is not reachable by a product of powers of omega")
        out.append(k % d)
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class LHVAssignment:
    d: int
    values: dict[tuple[int, Fraction], int]

    def __getitem__(self, key) -> int:
        return self.values[key]

    def to_dict(self) -> list:
        return [
            {"party": j, "setting": format_rational(y), "exponent": a} for (j, y), a in sorted(self.values.items())
        ]


def satisfies(inst: ParadoxInstance, assignment: LHVAssignment) -> bool:
    """Independent scalar check of one assignment against every observable."""
    req = _required_exponents(inst.observables, inst.targets, inst.d)
    for op, k in zip(inst.observables, req):
        total = sum(assignment[(j + 1, op.params[j])] for j in range(inst.n))
        if total % inst.d != k:
            return False
    return True


@dataclass(frozen=True)
class LHVResult:
    assignment: LHVAssignment | None
    count: int | None  # None when the search stopped at the first witness
    enumerated: int
    total: int
    backend: str
    wall_ms: float = 0.0

    @property
    def satisfiable(self) -> bool:
        return self.assignment is not None


def _partitions(total: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, total))
    step = -(-total // workers)
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def lhv_search(
    inst: ParadoxInstance,
    budget: int | None = None,
    stop_at_first: bool = False,
    workers: int = 1,
    backend: str | None = None,
) -> LHVResult:
    """Enumerate every deterministic assignment; exact satisfying count.

    With ``stop_at_first`` only the existence question is answered and
    ``count`` is None.
    """
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    var = Variables.from_operators(inst.observables)
    d = inst.d
    total = d ** len(var)
    if total > budget:
        raise ResourceError(
            f"{d}**{len(var)} = {total} assignments exceed the enumeration budget {budget}; "
            "use parity_certificate instead"
        )
    req = _required_exponents(inst.observables, inst.targets, d)
    coef_t = np.ascontiguousarray((var.coef % d).T)
    kern = kernels.get(backend)
    t0 = time.perf_counter()
    parts = _partitions(total, workers)

    def run(part):
        return kern.lhv_count(coef_t, req, d, part[0], part[1], stop_at_first)

    if len(parts) == 1:
        results = [run(parts[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = list(pool.map(run, parts))
    count = sum(r[0] for r in results)
    firsts = [r[1] for r in results if r[1] >= 0]
    first = min(firsts) if firsts else -1
    if stop_at_first:
        # later partitions may have run past the overall first hit; count what the serial scan would
        enumerated = first + 1 if first >= 0 else total
    else:
        enumerated = sum(r[2] for r in results)
    assignment = None
    if first >= 0:
        assignment = LHVAssignment(d, dict(zip(var.keys, var.decode(first, d))))
    return LHVResult(
        assignment,
        None if stop_at_first else int(count),
        int(enumerated),
        total,
        kern.BACKEND,
        (time.perf_counter() - t0) * 1e3,
    )


@dataclass(frozen=True)
class ParityCertificate:
    d: int
    totals: dict[tuple[int, Fraction], int]
    rhs: int
    verdict: str  # contradiction | satisfiable-parity | inconclusive

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "totals": [
                {"party": j, "setting": format_rational(y), "count": c} for (j, y), c in sorted(self.totals.items())
            ],
            "rhs_exponent": self.rhs,
            "verdict": self.verdict,
        }


def parity_certificate(inst: ParadoxInstance) -> ParityCertificate:
    """Multiply all constraints together.

    If every realistic value occurs an even number of times the product of the
    left-hand sides is an even power of omega; with d even and an odd
    right-hand exponent no assignment can exist.
    """
    d = inst.d
    totals = Counter((j + 1, op.params[j]) for op in inst.observables for j in range(inst.n))
    rhs = int(_required_exponents(inst.observables, inst.targets, d).sum() % d)
    all_even = all(c % 2 == 0 for c in totals.values())
    if all_even and d % 2 == 0 and rhs % 2 == 1:
        verdict = "contradiction"
    elif all_even:
        verdict = "satisfiable-parity"
    else:
        verdict = "inconclusive"
    return ParityCertificate(d, dict(totals), rhs, verdict)


# --------------------------------------------------------------------------
# classical maxima of Bell expressions


@dataclass(frozen=True)
class ClassicalBound:
    value: Fraction | float
    assignment: LHVAssignment
    enumerated: int
    method: str

    @property
    def exact(self) -> bool:
        return isinstance(self.value, (int, Fraction))


def _bell_data(expr):
    ops = [op for _, op in expr.terms]
    coeffs = [c for c, _ in expr.terms]
    for c in coeffs:
        if isinstance(c, complex):
            raise ContractError("Bell coefficients must be real")
    var = Variables.from_operators(ops)
    offsets = []
    for op in ops:
        k = op.global_phase.root_exponent(expr.d)
        if k is None:
            raise ContractError(f"global phase of {op!r} is not a power of omega")
        offsets.append(k % expr.d)
    return ops, coeffs, var, np.array(offsets, dtype=np.int64)


def _term_value(coeffs, exps, d: int):
    exact = d == 2 and all(isinstance(c, (int, Fraction)) for c in coeffs)
    if exact:
        val = sum((Fraction(c) if e == 0 else -Fraction(c)) for c, e in zip(coeffs, exps))
        return val.numerator if val.denominator == 1 else val
    table = kernels._fallback.cos_table(d)
    return float(sum(float(c) * table[e] for c, e in zip(coeffs, exps)))


def classical_bound(expr, budget: int | None = None) -> ClassicalBound:
    """Exact LHV maximum of ``sum_i c_i Re(term_i)``.

    The value depends on an assignment only through its pattern of term
    exponents ``A @ x mod d``. The reachable patterns form the subgroup of
    Z_d**m generated by the columns of ``A`` (at most ``d**m`` elements, m the
    number of terms), which is enumerated with one witness per pattern.
    """
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    ops, coeffs, var, offsets = _bell_data(expr)
    d = expr.d
    cols = [tuple(int(x) % d for x in var.coef[:, i]) for i in range(len(var))]
    zero = tuple(0 for _ in ops)
    reached: dict[tuple[int, ...], tuple[int, ...]] = {zero: (0,) * len(var)}
    for i, col in enumerate(cols):
        if not any(col):
            continue
        for pattern, witness in list(reached.items()):
            p = pattern
            for a in range(1, d):
                p = tuple((x + y) % d for x, y in zip(p, col))
                if p not in reached:
                    w = list(witness)
                    w[i] = a
                    reached[p] = tuple(w)
            if len(reached) > budget:
                raise ResourceError(f"more than {budget} reachable correlation patterns")
    best_val, best_w = None, None
    for pattern, witness in reached.items():
        exps = [(p + o) % d for p, o in zip(pattern, offsets)]
        val = _term_value(coeffs, exps, d)
        if best_val is None or val > best_val:
            best_val, best_w = val, witness
    assignment = LHVAssignment(d, dict(zip(var.keys, best_w)))
    return ClassicalBound(best_val, assignment, len(reached), "pattern-subgroup")


def classical_bound_exhaustive(expr, budget: int | None = None, backend: str | None = None) -> ClassicalBound:
    """Brute-force LHV maximum: every assignment of parties 1..n-1, last party in closed form."""
    budget = config.ENUMERATION_BUDGET if budget is None else budget
    ops, coeffs, var, offsets = _bell_data(expr)
    d, n = expr.d, expr.n
    inner = [i for i, (j, _) in enumerate(var.keys) if j == n]
    outer = [i for i, (j, _) in enumerate(var.keys) if j != n]
    total = d ** len(outer)
    if total > budget:
        raise ResourceError(f"{d}**{len(outer)} = {total} outer assignments exceed the enumeration budget {budget}")
    coef = var.coef % d
    outer_t = np.ascontiguousarray(coef[:, outer].T)
    inner_pos = {v: k for k, v in enumerate(inner)}
    inner_var = np.full(len(ops), -1, dtype=np.int64)
    for o in range(len(ops)):
        for v in inner:
            if coef[o, v]:
                if coef[o, v] != 1 or inner_var[o] >= 0:
                    raise ContractError("each term must touch the last party through exactly one setting")
                inner_var[o] = inner_pos[v]
    weights = np.array([float(c) for c in coeffs])
    kern = kernels.get(backend)
    _, best_outer, inner_digits = kern.bell_max(outer_t, inner_var, len(inner), offsets, weights, d, 0, total)
    digits = [0] * len(var)
    rest = best_outer
    for i in reversed(outer):
        rest, digits[i] = divmod(rest, d)
    for k, v in enumerate(inner):
        digits[v] = int(inner_digits[k])
    exps = [int((coef[o] @ np.array(digits) + offsets[o]) % d) for o in range(len(ops))]
    value = _term_value(coeffs, exps, d)
    return ClassicalBound(value, LHVAssignment(d, dict(zip(var.keys, digits))), total, f"exhaustive-{kern.BACKEND}")


def refutation_report(inst: ParadoxInstance, budget: int | None = None, workers: int = 1) -> dict:
    """Search plus parity certificate, in the report layout used by the CLI."""
    t0 = time.perf_counter()
    parity = parity_certificate(inst)
    try:
        res = lhv_search(inst, budget=budget, workers=workers)
    except ResourceError as exc:
        verdict = "paradox" if parity.verdict == "contradiction" else "inconclusive"
        return {
            "verdict": verdict,
            "method": "parity" if verdict == "paradox" else "none",
            "satisfying_count": 0 if verdict == "paradox" else None,
            "witness": None,
            "parity": parity.to_dict(),
            "enumerated": 0,
            "note": str(exc),
            "wall_ms": (time.perf_counter() - t0) * 1e3,
        }
    return {
        "verdict": "paradox" if res.count == 0 else "no-paradox",
        "method": "enumeration",
        "satisfying_count": res.count,
        "witness": None if res.assignment is None else res.assignment.to_dict(),
        "parity": parity.to_dict(),
        "enumerated": res.enumerated,
        "backend": res.backend,
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }
