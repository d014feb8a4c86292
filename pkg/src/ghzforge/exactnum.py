"""Exact rational and phase-exponent arithmetic.

Rationals are plain :class:`fractions.Fraction` objects (arbitrary precision,
always reduced). A :class:`Phase` is a rational taken modulo 1 and stands for
the unit complex number ``exp(2j*pi*value)``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import ContractError, ParseError

Rational = Fraction

__all__ = [
    "Rational",
    "Phase",
    "rational_reduce",
    "as_rational",
    "phase_add",
    "phase_to_complex",
    "format_rational",
    "parse_rational",
]


def rational_reduce(num: int, den: int) -> Fraction:
    if den == 0:
        raise ContractError("rational with zero denominator")
    return Fraction(int(num), int(den))


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings. Floats are rejected."""
    if isinstance(x, bool):
        raise ContractError(f"not a rational: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_rational(x)
    raise ContractError(f"not an exact rational: {x!r} (floats are not accepted)")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError, AttributeError) as exc:
        raise ParseError(f"cannot parse rational {text!r}") from exc


@dataclass(frozen=True, order=True)
class Phase:
    """``exp(2j*pi*value)`` with ``value`` kept in [0, 1)."""

    value: Fraction = Fraction(0)

    def __post_init__(self):
        v = as_rational(self.value)
        object.__setattr__(self, "value", v - math.floor(v))

    @classmethod
    def of(cls, x) -> Phase:
        return x if isinstance(x, Phase) else cls(as_rational(x))

    @classmethod
    def root(cls, k: int, d: int) -> Phase:
        """The phase of ``omega**k`` with ``omega = exp(2j*pi/d)``."""
        return cls(Fraction(k, d))

    def __add__(self, other) -> Phase:
        return Phase(self.value + Phase.of(other).value)

    __radd__ = __add__

    def __neg__(self) -> Phase:
        return Phase(-self.value)

    def __sub__(self, other) -> Phase:
        return Phase(self.value - Phase.of(other).value)

    def __mul__(self, k: int) -> Phase:
        if not isinstance(k, int):
            return NotImplemented
        return Phase(self.value * k)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return self.value != 0

    def root_exponent(self, d: int) -> int | None:
        """``k`` such that this phase equals ``omega**k``, else None."""
        k = self.value * d
        return int(k) if k.denominator == 1 else None

    def to_complex(self) -> complex:
        return phase_to_complex(self)

    def __str__(self) -> str:
        return format_rational(self.value)


def phase_add(a: Phase, b: Phase) -> Phase:
    return Phase.of(a) + Phase.of(b)


# exact values at the quarter turns keep Pauli matrices free of 1e-16 noise
_QUARTERS = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}


def phase_to_complex(a) -> complex:
    v = Phase.of(a).value
    exact = _QUARTERS.get(v)
    if exact is not None:
        return exact
    return cmath.exp(2j * math.pi * float(v))
