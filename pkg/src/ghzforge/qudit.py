"""Standard unitary observables, their tensor products and GHZ states.

Every operator here is monomial: a cyclic shift of the computational basis
with a phase attached to each input basis state. Phases are held exactly as
:class:`~ghzforge.exactnum.Phase` values, and applying an operator to a state
is an axis roll plus an elementwise phase multiply, so no ``d**n x d**n``
matrix is ever formed outside explicit cross-checks.

Basis convention: party 1 is the most significant digit of the mixed-radix
index, i.e. a state's amplitude tensor has shape ``(d,) * n`` in C order.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import ConsistencyError, ContractError, ParseError, ResourceError
from .exactnum import Phase, as_rational, format_rational, parse_rational, phase_to_complex

__all__ = [
    "LocalObservable",
    "LocalMonomial",
    "MonomialOperator",
    "TensorMonomial",
    "StateVector",
    "ghz_state",
    "local_matrix",
    "local_eigenbasis",
    "apply",
    "eigen_relation",
    "ghz_eigenphase",
    "operator_product",
    "dense_checks",
    "basis_state",
]

_dense_check = False


@contextlib.contextmanager
def dense_checks(enabled: bool = True):
    """Cross-validate every :func:`apply` against a dense matrix product."""
    global _dense_check
    previous, _dense_check = _dense_check, enabled
    try:
        yield
    finally:
        _dense_check = previous


def _check_dim(d: int):
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ContractError(f"dimension must be an integer >= 2, got {d!r}")


# --------------------------------------------------------------------------
# single-qudit pieces


@dataclass(frozen=True)
class LocalObservable:
    """The standard observable ``X_r`` on one qudit of dimension ``d``."""

    d: int
    r: Fraction

    def __post_init__(self):
        _check_dim(self.d)
        object.__setattr__(self, "r", as_rational(self.r))

    def monomial(self) -> LocalMonomial:
        omega_r = Phase(self.r / self.d)
        wrap = omega_r - self.r
        return LocalMonomial(self.d, 1, (wrap,) + (omega_r,) * (self.d - 1))


def local_matrix(obs: LocalObservable) -> np.ndarray:
    """Dense ``X_r``, evaluated straight from its defining formula.

    ``omega**r * (exp(-2j*pi*r) |d-1><0| + sum_{s>=1} |s-1><s|)``
    """
    d, r = obs.d, float(obs.r)
    omega_r = np.exp(2j * np.pi * r / d)
    m = np.zeros((d, d), dtype=complex)
    m[d - 1, 0] = omega_r * np.exp(-2j * np.pi * r)
    for s in range(1, d):
        m[s - 1, s] = omega_r
    return m


def local_eigenbasis(obs: LocalObservable) -> list[tuple[Phase, np.ndarray]]:
    """Eigenpairs of ``X_r`` ordered by eigenvalue ``omega**k``, k = 0..d-1.

    ``X_r`` is a single d-cycle whose loop phase is 1, so its spectrum is
    exactly the d-th roots of unity. The eigenvector for ``omega**k`` has
    amplitudes ``exp(2j*pi*s*(k - r)/d) / sqrt(d)``.
    """
    d, r = obs.d, obs.r
    s = np.arange(d)
    out = []
    for k in range(d):
        frac = [float(((k - r) * int(j) / d) % 1) for j in s]
        vec = np.exp(2j * np.pi * np.array(frac)) / math.sqrt(d)
        out.append((Phase(Fraction(k, d)), vec))
    return out


@dataclass(frozen=True)
class LocalMonomial:
    """``|s> -> exp(2j*pi*phases[s]) |s - shift mod d>``."""

    d: int
    shift: int
    phases: tuple[Phase, ...]

    def __post_init__(self):
        _check_dim(self.d)
        if len(self.phases) != self.d:
            raise ContractError("phase table length must equal the dimension")
        object.__setattr__(self, "shift", int(self.shift) % self.d)
        object.__setattr__(self, "phases", tuple(Phase.of(p) for p in self.phases))

    @classmethod
    def identity(cls, d: int) -> LocalMonomial:
        return cls(d, 0, (Phase(),) * d)

    def compose(self, other: LocalMonomial) -> LocalMonomial:
        """``self @ other``."""
        d = self.d
        phases = tuple(other.phases[s] + self.phases[(s - other.shift) % d] for s in range(d))
        return LocalMonomial(d, self.shift + other.shift, phases)

    def adjoint(self) -> LocalMonomial:
        d, t = self.d, self.shift
        return LocalMonomial(d, -t, tuple(-self.phases[(u + t) % d] for u in range(d)))

    def phase_floats(self) -> np.ndarray:
        return np.array([float(p.value) for p in self.phases])

    def matrix(self) -> np.ndarray:
        d = self.d
        m = np.zeros((d, d), dtype=complex)
        for s, p in enumerate(self.phases):
            m[(s - self.shift) % d, s] = phase_to_complex(p)
        return m

    @property
    def is_identity(self) -> bool:
        return self.shift == 0 and not any(self.phases)


# --------------------------------------------------------------------------
# n-qudit operators


class _Monomial:
    """Shared machinery for tensor products of local monomials."""

    n: int
    d: int
    global_phase: Phase
    factors: tuple[LocalMonomial, ...]

    @property
    def dim(self) -> int:
        return self.d**self.n

    @property
    def shifts(self) -> tuple[int, ...]:
        return tuple(f.shift for f in self.factors)

    @cached_property
    def phase_tensor(self) -> np.ndarray:
        """``exp(2j*pi*phase)`` for every input basis state, shape ``(d,)*n``."""
        n, d = self.n, self.d
        total = np.full((d,) * n, float(self.global_phase.value))
        for k, f in enumerate(self.factors):
            shape = [1] * n
            shape[k] = d
            total = total + f.phase_floats().reshape(shape)
        return np.exp(2j * np.pi * total)

    def exact_phase(self, digits: Sequence[int]) -> Phase:
        return reduce(lambda acc, kf: acc + kf[1].phases[digits[kf[0]]], enumerate(self.factors), self.global_phase)

    def dense(self) -> np.ndarray:
        mats = [f.matrix() for f in self.factors]
        return phase_to_complex(self.global_phase) * reduce(np.kron, mats)

    def as_tensor(self) -> TensorMonomial:
        return TensorMonomial(tuple(self.factors), self.global_phase)

    def adjoint(self) -> TensorMonomial:
        return TensorMonomial(tuple(f.adjoint() for f in self.factors), -self.global_phase)

    def __matmul__(self, other) -> TensorMonomial:
        return operator_product(self, other)


@dataclass(frozen=True)
class MonomialOperator(_Monomial):
    """``exp(2j*pi*global_phase) * X(r_1) (x) ... (x) X(r_n)``."""

    d: int
    params: tuple[Fraction, ...]
    global_phase: Phase = Phase()

    def __post_init__(self):
        _check_dim(self.d)
        params = tuple(as_rational(r) for r in self.params)
        if not params:
            raise ContractError("an operator needs at least one party")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "global_phase", Phase.of(self.global_phase))

    @property
    def n(self) -> int:
        return len(self.params)

    @cached_property
    def factors(self) -> tuple[LocalMonomial, ...]:
        return tuple(LocalObservable(self.d, r).monomial() for r in self.params)

    @property
    def total(self) -> Fraction:
        return sum(self.params, Fraction(0))

    def local(self, party: int) -> LocalObservable:
        """Local observable on ``party`` (1-based)."""
        return LocalObservable(self.d, self.params[party - 1])

    def restrict(self, parties: Iterable[int]) -> MonomialOperator:
        """Drop every party not in ``parties`` (1-based), keeping local phases."""
        return MonomialOperator(self.d, tuple(self.params[j - 1] for j in parties), self.global_phase)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "params": [format_rational(r) for r in self.params],
            "global_phase": format_rational(self.global_phase.value),
        }

    @classmethod
    def from_dict(cls, data: dict) -> MonomialOperator:
        try:
            params = tuple(parse_rational(p) for p in data["params"])
            op = cls(int(data["d"]), params, Phase(parse_rational(data.get("global_phase", "0"))))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed operator: {exc}") from exc
        if "n" in data and int(data["n"]) != op.n:
            raise ParseError(f"operator declares n={data['n']} but has {op.n} params")
        return op

    def __repr__(self) -> str:
        body = ", ".join(str(r) for r in self.params)
        tail = f", phase={self.global_phase}" if self.global_phase else ""
        return f"X[d={self.d}]({body}{tail})"


@dataclass(frozen=True)
class TensorMonomial(_Monomial):
    """General tensor product of local monomials; closed under products and adjoints."""

    factors: tuple[LocalMonomial, ...]
    global_phase: Phase = Phase()

    def __post_init__(self):
        if not self.factors:
            raise ContractError("an operator needs at least one party")
        dims = {f.d for f in self.factors}
        if len(dims) != 1:
            raise ContractError("all factors must share one dimension")
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "global_phase", Phase.of(self.global_phase))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def d(self) -> int:
        return self.factors[0].d

    @property
    def is_identity(self) -> bool:
        return not self.global_phase and all(f.is_identity for f in self.factors)

    @property
    def is_diagonal(self) -> bool:
        return all(f.shift == 0 for f in self.factors)

    def normalized(self) -> TensorMonomial:
        """Move any constant per-party phase into the global phase."""
        factors, g = [], self.global_phase
        for f in self.factors:
            if all(p == f.phases[0] for p in f.phases):
                g = g + f.phases[0]
                f = LocalMonomial(f.d, f.shift, (Phase(),) * f.d)
            factors.append(f)
        return TensorMonomial(tuple(factors), g)


def operator_product(a: _Monomial, b: _Monomial) -> TensorMonomial:
    """Exact product ``a @ b`` of two monomial operators."""
    if a.n != b.n or a.d != b.d:
        raise ContractError(f"shape mismatch: (n={a.n}, d={a.d}) vs (n={b.n}, d={b.d})")
    factors = tuple(fa.compose(fb) for fa, fb in zip(a.factors, b.factors))
    return TensorMonomial(factors, a.global_phase + b.global_phase).normalized()


# --------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_dim(self.d)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.d**self.n:
            raise ContractError(f"expected {self.d**self.n} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.d**self.n

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.d,) * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> StateVector:
        try:
            amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
            return cls(int(data["n"]), int(data["d"]), amps)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed state: {exc}") from exc


def _check_budget(n: int, d: int, max_amplitudes: int | None):
    limit = config.MEMORY_BUDGET if max_amplitudes is None else max_amplitudes
    if d**n > limit:
        raise ResourceError(f"state of dimension {d}**{n} = {d**n} exceeds the memory budget of {limit} amplitudes")


def ghz_state(n: int, d: int, phases: Sequence | None = None, max_amplitudes: int | None = None) -> StateVector:
    """``sum_i exp(2j*pi*phases[i]) |i...i> / sqrt(d)``; plain GHZ when ``phases`` is None."""
    if n < 2:
        raise ContractError(f"GHZ state needs n >= 2, got {n}")
    _check_dim(d)
    _check_budget(n, d, max_amplitudes)
    amps = np.zeros(d**n, dtype=complex)
    step = sum(d**k for k in range(n))  # index of |1...1>
    for i in range(d):
        p = Phase() if phases is None else Phase.of(phases[i])
        amps[i * step] = phase_to_complex(p) / math.sqrt(d)
    return StateVector(n, d, amps)


def basis_state(n: int, d: int, digits: Sequence[int]) -> StateVector:
    amps = np.zeros(d**n, dtype=complex)
    amps[int(np.ravel_multi_index(tuple(digits), (d,) * n))] = 1.0
    return StateVector(n, d, amps)


def _apply_array(op: _Monomial, psi: np.ndarray) -> np.ndarray:
    out = op.phase_tensor * psi.reshape((op.d,) * op.n)
    for axis, t in enumerate(op.shifts):
        if t:
            out = np.roll(out, -t, axis=axis)
    return out.reshape(-1)


def apply(op: _Monomial, state: StateVector) -> StateVector:
    """``op |state>`` in O(d**n) without materializing the operator."""
    if op.n != state.n or op.d != state.d:
        raise ContractError(f"shape mismatch: operator (n={op.n}, d={op.d}) vs state (n={state.n}, d={state.d})")
    out = _apply_array(op, state.amplitudes)
    if _dense_check and state.dim <= config.DENSE_CHECK_DIM_LIMIT:
        ref = op.dense() @ state.amplitudes
        err = float(np.max(np.abs(ref - out)))
        if err > 1e-12:
            raise ConsistencyError(f"monomial action disagrees with dense action by {err:.3e} for {op!r}")
    return StateVector(state.n, state.d, out)


def eigen_relation(op: _Monomial, state: StateVector, tol: float = config.EIGEN_TOL) -> Phase | None:
    """Phase ``k/d`` with ``op|state> = omega**k |state>`` (residual <= tol), else None."""
    if tol <= 0:
        raise ContractError("tolerance must be positive")
    psi = state.amplitudes
    norm2 = float(np.vdot(psi, psi).real)
    if norm2 == 0:
        return None
    out = apply(op, state).amplitudes
    lam = np.vdot(psi, out) / norm2
    if abs(lam) < 0.5:
        return None
    turns = (np.angle(lam) / (2 * np.pi)) % 1.0
    k = int(round(turns * state.d))
    if abs(turns * state.d - k) >= 0.25:
        return None
    snapped = Phase(Fraction(k % state.d, state.d))
    residual = np.linalg.norm(out - phase_to_complex(snapped) * psi) / math.sqrt(norm2)
    return snapped if residual <= tol else None


def ghz_eigenphase(op: _Monomial, phases: Sequence | None = None) -> Phase | None:
    """Exact eigenphase of ``op`` on the (phased) GHZ state, or None.

    The GHZ state is an eigenvector only if every party is shifted by the same
    amount ``t``; then ``|i..i>`` maps to ``|i-t..i-t>`` and the state phases
    must line up cyclically.
    """
    d = op.d
    theta = [Phase()] * d if phases is None else [Phase.of(p) for p in phases]
    shifts = set(op.shifts)
    if len(shifts) != 1:
        return None
    (t,) = shifts
    lam = None
    for i in range(d):
        here = theta[i] + op.exact_phase([i] * op.n) - theta[(i - t) % d]
        if lam is None:
            lam = here
        elif here != lam:
            return None
    return lam
