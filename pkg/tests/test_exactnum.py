from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzforge.errors import ContractError, ParseError
from ghzforge.exactnum import (
    Phase,
    as_rational,
    format_rational,
    parse_rational,
    phase_add,
    phase_to_complex,
    rational_reduce,
)

rationals = st.fractions(max_denominator=10**6)


@pytest.mark.parametrize(
    "num, den, expected",
    [(2, 4, Fraction(1, 2)), (1 - 2, 6, Fraction(-1, 6)), (3, -6, Fraction(-1, 2))],
)
def test_rational_reduce(num, den, expected):
    assert rational_reduce(num, den) == expected


def test_zero_denominator_rejected():
    with pytest.raises(ContractError):
        rational_reduce(1, 0)


def test_floats_rejected():
    with pytest.raises(ContractError):
        as_rational(0.5)


def test_large_denominators_stay_exact():
    x = Fraction(1, 3 * (2**70 - 1))
    assert parse_rational(format_rational(x)) == x


@pytest.mark.parametrize(
    "a, b, expected",
    [("1/2", "1/2", "0"), ("5/6", "1/3", "1/6"), ("3/7", "0", "3/7")],
)
def test_phase_add(a, b, expected):
    assert phase_add(Phase.of(Fraction(a)), Phase.of(Fraction(b))) == Phase.of(Fraction(expected))


@pytest.mark.parametrize("x, z", [("0", 1 + 0j), ("1/2", -1 + 0j), ("1/4", 1j)])
def test_phase_to_complex_quarter_turns(x, z):
    assert phase_to_complex(Phase.of(Fraction(x))) == z


def test_format_and_parse():
    assert format_rational(Fraction(0)) == "0/1"
    assert format_rational(Fraction(-1, 6)) == "-1/6"
    assert parse_rational("-1/6") == Fraction(-1, 6)
    assert parse_rational("3") == 3
    with pytest.raises(ParseError):
        parse_rational("1/x")
    with pytest.raises(ParseError):
        parse_rational("1/0")


@given(rationals, rationals, rationals)
def test_addition_associative_and_inverse(a, b, c):
    assert (a + b) + c == a + (b + c)
    pa, pb, pc = Phase.of(a), Phase.of(b), Phase.of(c)
    assert (pa + pb) + pc == pa + (pb + pc)
    assert pa + (-pa) == Phase()


@given(rationals, rationals)
def test_phase_to_complex_is_a_homomorphism(a, b):
    pa, pb = Phase.of(a), Phase.of(b)
    assert abs(phase_to_complex(phase_add(pa, pb)) - phase_to_complex(pa) * phase_to_complex(pb)) < 1e-14


@given(st.integers(-10**9, 10**9), st.integers(1, 10**9))
def test_rational_reduce_idempotent(p, q):
    r = rational_reduce(p, q)
    assert rational_reduce(r.numerator, r.denominator) == r


def test_root_exponent():
    assert Phase.root(3, 4).root_exponent(4) == 3
    assert Phase.of(Fraction(1, 3)).root_exponent(2) is None
