"""GHZ vectors and the observable sets built from them.

Parties are numbered 1..n and shifts 0..n-1. The k-shifted vector carries, at
party j, the base entry at position ``((j - k - 1) mod n) + 1``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ConsistencyError, ContractError, DomainError, ParseError
from .exactnum import Phase, as_rational, format_rational, parse_rational
from .qudit import MonomialOperator, ghz_eigenphase

__all__ = [
    "SettingsProfile",
    "ParadoxInstance",
    "GhzCheck",
    "sigma_of",
    "special_entry",
    "cyclic_shift",
    "settings_profile",
    "is_ghz_vector",
    "three_setting_vector",
    "theorem2_vector",
    "theorem2_mu",
    "theorem1_instance",
    "mermin_instance",
    "mermin_embedded_instance",
]


def sigma_of(n: int) -> int:
    return 1 if n % 2 else 2


def special_entry(n: int, d: int) -> Fraction:
    """``b = (1 - d) / n``."""
    return Fraction(1 - d, n)


def _vector(r: Sequence) -> tuple[Fraction, ...]:
    return tuple(as_rational(x) for x in r)


def cyclic_shift(r: Sequence, k: int) -> tuple[Fraction, ...]:
    """Right cyclic shift: entry j of the result is entry (j - k) mod n of ``r``."""
    r = _vector(r)
    n = len(r)
    return tuple(r[(j - k) % n] for j in range(n))


@dataclass(frozen=True)
class SettingsProfile:
    """Distinct entries of a vector and how often each occurs."""

    multiplicity: dict[Fraction, int]

    @property
    def settings(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.multiplicity))

    @property
    def t(self) -> int:
        return len(self.multiplicity)

    def __getitem__(self, y) -> int:
        return self.multiplicity.get(as_rational(y), 0)


def settings_profile(r: Sequence) -> SettingsProfile:
    return SettingsProfile(dict(Counter(_vector(r))))


@dataclass(frozen=True)
class GhzCheck:
    ok: bool
    item: str | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_ghz_vector(r: Sequence, d: int) -> GhzCheck:
    """Check the three GHZ-vector conditions for dimension ``d``.

    (i) ``b = (1-d)/n`` occurs an odd number of times; (ii) every other nonzero
    entry occurs an even number of times; (iii) the entries sum to zero.
    """
    r = _vector(r)
    n = len(r)
    if n < 3:
        return GhzCheck(False, "length", f"need at least 3 entries, got {n}")
    b = special_entry(n, d)
    g = settings_profile(r)
    if g[b] % 2 == 0:
        return GhzCheck(False, "i", f"b = {format_rational(b)} occurs {g[b]} times (must be odd)")
    for y in g.settings:
        if y not in (0, b) and g[y] % 2:
            return GhzCheck(False, "ii", f"entry {format_rational(y)} occurs {g[y]} times (must be even)")
    total = sum(r, Fraction(0))
    if total != 0:
        return GhzCheck(False, "iii", f"entries sum to {format_rational(total)}, not 0")
    return GhzCheck(True)


def three_setting_vector(n: int, d: int) -> tuple[Fraction, ...]:
    """``(0, b, c, ..., c)`` with ``c = (d-1) / (n(n-2))``; needs even n >= 4 and even d."""
    if n < 4 or n % 2:
        raise DomainError(f"three-setting family needs even n >= 4, got n={n}")
    if d < 2 or d % 2:
        raise DomainError(f"three-setting family needs even d, got d={d}")
    b = special_entry(n, d)
    c = Fraction(d - 1, n * (n - 2))
    return (Fraction(0), b) + (c,) * (n - 2)


def theorem2_mu(n: int) -> tuple[int, ...]:
    """Level index ``mu(k) = s + 1/2 - |s + 1/2 + sigma - k|`` for positions k = 1..n."""
    s = (n - 1) // 2
    sigma = sigma_of(n)
    half = Fraction(1, 2)
    out = []
    for k in range(1, n + 1):
        mu = s + half - abs(s + half + sigma - k)
        if mu.denominator != 1 or not -1 <= mu <= s:
            raise ConsistencyError(f"mu({k}) = {mu} out of range for n={n}")
        if mu == -1 and sigma != 2:
            raise ConsistencyError(f"mu({k}) = -1 with odd n={n}")
        out.append(int(mu))
    return tuple(out)


def theorem2_vector(n: int, d: int = 2) -> tuple[Fraction, ...]:
    """Genuine multi-setting vector: ``r_k = b_mu(k)``.

    ``b_mu = 2**(s-1-mu) / (1 - 2**s) * b`` for 1 <= mu <= s, ``b_0 = b`` and
    ``b_-1 = 0``. Qubits (d = 2) are the intended case; other d keep the same
    shape with ``b = (1-d)/n``.
    """
    if n < 3:
        raise DomainError(f"needs n >= 3, got n={n}")
    s = (n - 1) // 2
    b = special_entry(n, d)
    levels = {-1: Fraction(0), 0: b}
    for mu in range(1, s + 1):
        levels[mu] = Fraction(2) ** (s - 1 - mu) / (1 - 2**s) * b
    return tuple(levels[mu] for mu in theorem2_mu(n))


@dataclass(frozen=True)
class ParadoxInstance:
    """Observables with prescribed eigenvalues on a reference GHZ state.

    ``state_phases`` gives the reference state
    ``sum_i exp(2j*pi*state_phases[i]) |i..i> / sqrt(d)``; all zero is the
    plain GHZ state.
    """

    n: int
    d: int
    observables: tuple[MonomialOperator, ...]
    targets: tuple[Phase, ...]
    certified: bool = True
    state_phases: tuple[Phase, ...] | None = None
    family: str = "custom"
    vector: tuple[Fraction, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        obs = tuple(self.observables)
        targets = tuple(Phase.of(t) for t in self.targets)
        if len(obs) != len(targets):
            raise ContractError(f"{len(obs)} observables but {len(targets)} targets")
        for op in obs:
            if op.n != self.n or op.d != self.d:
                raise ContractError(f"observable {op!r} does not act on n={self.n}, d={self.d}")
        for t in targets:
            if t.root_exponent(self.d) is None:
                raise ContractError(f"target {t} is not a power of omega for d={self.d}")
        object.__setattr__(self, "observables", obs)
        object.__setattr__(self, "targets", targets)
        if self.state_phases is not None:
            phases = tuple(Phase.of(p) for p in self.state_phases)
            if len(phases) != self.d:
                raise ContractError("state_phases must have d entries")
            object.__setattr__(self, "state_phases", None if not any(phases) else phases)

    @property
    def sigma(self) -> int:
        return sigma_of(self.n)

    def __len__(self) -> int:
        return len(self.observables)

    def target_exponents(self) -> tuple[int, ...]:
        return tuple(t.root_exponent(self.d) for t in self.targets)

    def party_profiles(self) -> tuple[SettingsProfile, ...]:
        """Per party: the distinct local settings used and how often each occurs."""
        return tuple(
            SettingsProfile(dict(Counter(op.params[j] for op in self.observables))) for j in range(self.n)
        )

    def verify_targets(self) -> list[int]:
        """Indices of observables whose exact GHZ eigenphase differs from the target."""
        return [
            i
            for i, (op, t) in enumerate(zip(self.observables, self.targets))
            if ghz_eigenphase(op, self.state_phases) != t
        ]

    def subset(self, indices: Sequence[int]) -> ParadoxInstance:
        return ParadoxInstance(
            self.n,
            self.d,
            tuple(self.observables[i] for i in indices),
            tuple(self.targets[i] for i in indices),
            certified=False,
            state_phases=self.state_phases,
            family=self.family,
        )

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "sigma": self.sigma,
            "family": self.family,
            "vectors": [[format_rational(r) for r in op.params] for op in self.observables],
            "targets": [format_rational(t.value) for t in self.targets],
            "certified": self.certified,
        }
        if self.state_phases is not None:
            out["state_phases"] = [format_rational(p.value) for p in self.state_phases]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ParadoxInstance:
        try:
            n, d = int(data["n"]), int(data["d"])
            vectors = [tuple(parse_rational(x) for x in row) for row in data["vectors"]]
            targets = tuple(Phase(parse_rational(t)) for t in data["targets"])
            phases = data.get("state_phases")
            phases = None if phases is None else tuple(Phase(parse_rational(p)) for p in phases)
            certified = bool(data.get("certified", False))
            family = str(data.get("family", "custom"))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed instance: missing or invalid field {exc}") from exc
        for i, row in enumerate(vectors):
            if len(row) != n:
                raise ParseError(f"vectors[{i}] has {len(row)} entries, expected n={n}")
        if "sigma" in data and int(data["sigma"]) != sigma_of(n):
            raise ParseError(f"sigma={data['sigma']} inconsistent with n={n}")
        try:
            obs = tuple(MonomialOperator(d, row) for row in vectors)
            return cls(n, d, obs, targets, certified=certified, state_phases=phases, family=family)
        except ContractError as exc:
            raise ParseError(str(exc)) from exc


def theorem1_instance(r: Sequence, d: int, force: bool = False, family: str = "theorem1") -> ParadoxInstance:
    """The n + sigma observables: all n shifts of ``r``, ``X(0)`` when n is even, and ``X(b*1)``.

    Targets are 1 for the shifts and ``X(0)``, and ``omega`` for ``X(b*1)``.
    With ``force`` the GHZ-vector and even-d preconditions are skipped and the
    instance is marked uncertified.
    """
    r = _vector(r)
    n = len(r)
    check = is_ghz_vector(r, d)
    certified = bool(check) and d % 2 == 0
    if not force:
        if not check:
            raise ContractError(f"not a GHZ vector for d={d}: item {check.item}: {check.reason}")
        if d % 2:
            raise DomainError(f"the parity paradox needs even d, got d={d}")
    b = special_entry(n, d)
    ops = [MonomialOperator(d, cyclic_shift(r, k)) for k in range(n)]
    targets = [Phase()] * n
    if sigma_of(n) == 2:
        ops.append(MonomialOperator(d, (Fraction(0),) * n))
        targets.append(Phase())
    ops.append(MonomialOperator(d, (b,) * n))
    targets.append(Phase(Fraction(1, d)))
    inst = ParadoxInstance(n, d, tuple(ops), tuple(targets), certified=certified, family=family, vector=r)
    bad = inst.verify_targets()
    if bad:
        if certified:
            raise ConsistencyError(f"targets of observables {bad} not realized on the GHZ state")
        # an uncertified vector may not stabilize; record what it actually does
        actual = tuple(ghz_eigenphase(op) for op in inst.observables)
        if any(a is None or a.root_exponent(d) is None for a in actual):
            raise ContractError(f"observables {bad} have no power-of-omega eigenvalue on the GHZ state")
        inst = ParadoxInstance(n, d, inst.observables, actual, certified=False, family=family, vector=r)
    return inst


_X = Fraction(0)
_Y = Fraction(-1, 2)
MINUS_GHZ = (Phase(), Phase(Fraction(1, 2)))


def mermin_instance() -> ParadoxInstance:
    """``{X1 Y2 Y3, Y1 X2 Y3, Y1 Y2 X3, -X1 X2 X3}`` on ``(|000> - |111>)/sqrt(2)``.

    The sign of the last observable is carried by its target (-1).
    """
    rows = [(_X, _Y, _Y), (_Y, _X, _Y), (_Y, _Y, _X), (_X, _X, _X)]
    targets = (Phase(), Phase(), Phase(), Phase(Fraction(1, 2)))
    inst = ParadoxInstance(
        3, 2, tuple(MonomialOperator(2, row) for row in rows), targets, state_phases=MINUS_GHZ, family="mermin"
    )
    if inst.verify_targets():
        raise ConsistencyError("Mermin targets not realized")
    return inst


def mermin_embedded_instance() -> ParadoxInstance:
    """Reducible 4-party control: each Mermin row tensored with ``X`` on party 4."""
    base = mermin_instance()
    ops = tuple(MonomialOperator(2, op.params + (_X,)) for op in base.observables)
    inst = ParadoxInstance(4, 2, ops, base.targets, state_phases=MINUS_GHZ, family="mermin-embedded")
    if inst.verify_targets():
        raise ConsistencyError("embedded Mermin targets not realized")
    return inst
