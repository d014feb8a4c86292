from fractions import Fraction as F

import numpy as np
import pytest

from ghzforge.bell import BellExpression, build_bell, quantum_value, sample_correlations, sample_outcomes
from ghzforge.errors import ContractError
from ghzforge.lhv import classical_bound
from ghzforge.paradox import sigma_of, theorem2_vector, three_setting_vector
from ghzforge.qudit import MonomialOperator, basis_state, ghz_state


@pytest.mark.parametrize("n, terms", [(3, 4), (4, 6), (6, 8)])
def test_term_counts(n, terms):
    expr = build_bell(theorem2_vector(n))
    assert len(expr.terms) == terms
    coeffs = [c for c, _ in expr.terms]
    assert coeffs[-1] == -1 and all(c == 1 for c in coeffs[:-1])
    if n % 2 == 0:
        assert expr.terms[n][1].params == (F(0),) * n


def test_rejects_bad_input():
    with pytest.raises(ContractError):
        build_bell(theorem2_vector(4, 4), 4)
    with pytest.raises(ContractError):
        build_bell((F(1, 3), F(1, 3), F(-2, 3)))
    with pytest.raises(ContractError):
        BellExpression(2, 2, ((1j, MonomialOperator(2, (F(0), F(0)))),))


@pytest.mark.parametrize("n", range(3, 11))
def test_quantum_value(n):
    expr = build_bell(theorem2_vector(n))
    assert abs(quantum_value(expr, ghz_state(n, 2)) - (n + sigma_of(n))) <= 1e-9


@pytest.mark.parametrize("n", range(3, 9))
def test_gap_is_two(n):
    expr = build_bell(theorem2_vector(n))
    cb = classical_bound(expr)
    assert cb.value == n + sigma_of(n) - 2
    assert abs(quantum_value(expr, ghz_state(n, 2)) - cb.value - 2) <= 1e-9


def test_three_setting_family_value():
    for n in (4, 6):
        expr = build_bell(three_setting_vector(n, 2))
        assert abs(quantum_value(expr, ghz_state(n, 2)) - (n + 2)) <= 1e-9


def test_shift_term_on_basis_state_has_zero_value():
    expr = BellExpression(3, 2, ((1, MonomialOperator(2, (F(0),) * 3)),))
    assert quantum_value(expr, basis_state(3, 2, (0, 0, 0))) == 0


def test_stabilizing_terms_are_deterministic():
    expr = build_bell(theorem2_vector(4))
    rep = sample_correlations(expr, ghz_state(4, 2), 2000, seed=3)
    for row, (c, _) in zip(rep.terms, expr.terms):
        assert row["variance"] == 0.0 and row["stderr"] == 0.0 and row["constant"]
    assert rep.terms[0]["mean"] == 1.0
    assert rep.terms[-1]["mean"] == -1.0
    assert rep.estimate == 6.0


def test_mixed_term_mean_converges():
    op = MonomialOperator(2, (F(1, 3), F(0), F(-1, 5)))
    expr = BellExpression(3, 2, ((1, op),))
    psi = ghz_state(3, 2)
    rep = sample_correlations(expr, psi, 40000, seed=1)
    exact = quantum_value(expr, psi)
    assert 0 < rep.stderr
    assert abs(rep.estimate - exact) < 4 * rep.stderr


def test_marginals_are_uniform():
    shots = 40000
    rng = np.random.Generator(np.random.Philox(12))
    for d, n in [(2, 4), (3, 3)]:
        op = MonomialOperator(d, tuple(F(k, 7) for k in range(n)))
        out = sample_outcomes(op, ghz_state(n, d), shots, rng)
        for j in range(n):
            freq = np.bincount(out[:, j], minlength=d) / shots
            assert np.all(np.abs(freq - 1 / d) <= 4 / np.sqrt(shots))


def test_seed_determinism():
    expr = build_bell(theorem2_vector(5))
    psi = ghz_state(5, 2)
    a = sample_correlations(expr, psi, 5000, seed=42, partitions=4)
    b = sample_correlations(expr, psi, 5000, seed=42, partitions=4, workers=3)
    assert a == b
    op = MonomialOperator(2, (F(1, 3), F(0), F(-1, 5), F(1, 2), F(0)))
    mixed = BellExpression(5, 2, ((1, op),))
    c = sample_correlations(mixed, psi, 5000, seed=42)
    d = sample_correlations(mixed, psi, 5000, seed=43)
    assert c.estimate != d.estimate


def test_csv_output(tmp_path):
    expr = build_bell(theorem2_vector(3))
    rep = sample_correlations(expr, ghz_state(3, 2), 100, seed=0, partitions=2)
    path = tmp_path / "terms.csv"
    rep.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "term,shot_batch,shots,mean,stderr"
    assert len(lines) == 1 + len(expr.terms) * 2
    assert rep.to_dict()["generator"] == "numpy.random.Philox"
