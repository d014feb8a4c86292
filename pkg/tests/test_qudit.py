from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzforge.errors import ConsistencyError, ContractError, ResourceError
from ghzforge.exactnum import Phase
from ghzforge.qudit import (
    LocalMonomial,
    LocalObservable,
    MonomialOperator,
    StateVector,
    TensorMonomial,
    apply,
    basis_state,
    dense_checks,
    eigen_relation,
    ghz_eigenphase,
    ghz_state,
    local_eigenbasis,
    local_matrix,
    operator_product,
)

PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]])
PZ = np.diag([1.0, -1.0]).astype(complex)


def small_rational(rng, max_den=60):
    q = int(rng.integers(1, max_den + 1))
    return Fraction(int(rng.integers(-3 * q, 3 * q + 1)), q)


def test_ghz_state_examples():
    s = 1 / np.sqrt(2)
    assert np.allclose(ghz_state(2, 2).amplitudes, [s, 0, 0, s])
    amp = ghz_state(3, 2).amplitudes
    assert np.flatnonzero(amp).tolist() == [0, 7] and np.allclose(amp[[0, 7]], s)
    amp = ghz_state(2, 3).amplitudes
    assert np.flatnonzero(amp).tolist() == [0, 4, 8] and np.allclose(amp[[0, 4, 8]], 1 / np.sqrt(3))


def test_ghz_state_budget():
    with pytest.raises(ResourceError):
        ghz_state(10, 2, max_amplitudes=100)


def test_local_matrix_examples():
    assert np.allclose(local_matrix(LocalObservable(2, Fraction(0))), PX)
    assert np.allclose(local_matrix(LocalObservable(2, Fraction(-1, 2))), PY)
    cycle = np.zeros((3, 3))
    cycle[0, 1] = cycle[1, 2] = cycle[2, 0] = 1
    assert np.allclose(local_matrix(LocalObservable(3, Fraction(0))), cycle)


def test_local_matrix_dth_power_is_identity():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        m = local_matrix(LocalObservable(d, small_rational(rng)))
        assert np.allclose(np.linalg.matrix_power(m, d), np.eye(d), atol=1e-12, rtol=0)


def test_qubit_observable_is_cos_x_minus_sin_y():
    # the sign in front of Y follows from the matrix definition
    rng = np.random.default_rng(2)
    for _ in range(100):
        r = small_rational(rng)
        expected = np.cos(np.pi * r) * PX - np.sin(np.pi * r) * PY
        assert np.allclose(local_matrix(LocalObservable(2, r)), expected, atol=1e-12, rtol=0)


@pytest.mark.parametrize("d, r", [(2, "0"), (2, "1/3"), (2, "-5/7"), (3, "0"), (3, "2/5"), (5, "-1/4")])
def test_local_eigenbasis(d, r):
    obs = LocalObservable(d, Fraction(r))
    m = local_matrix(obs)
    basis = local_eigenbasis(obs)
    assert [ph for ph, _ in basis] == [Phase.root(k, d) for k in range(d)]
    vecs = np.stack([v for _, v in basis], axis=1)
    assert np.allclose(vecs.conj().T @ vecs, np.eye(d), atol=1e-12)
    for ph, v in basis:
        assert np.allclose(m @ v, ph.to_complex() * v, atol=1e-12)


def test_qubit_eigenvectors_closed_form():
    r = Fraction(1, 5)
    (_, plus), (_, minus) = local_eigenbasis(LocalObservable(2, r))
    e = np.exp(-1j * np.pi * float(r))
    assert abs(abs(np.vdot(plus, np.array([1, e]) / np.sqrt(2))) - 1) < 1e-12
    assert abs(abs(np.vdot(minus, np.array([1, -e]) / np.sqrt(2))) - 1) < 1e-12


def test_ghz_action_examples():
    for n, d in [(3, 2), (4, 3), (6, 2)]:
        psi = ghz_state(n, d)
        b = Fraction(1 - d, n)
        assert eigen_relation(MonomialOperator(d, (Fraction(0),) * n), psi) == Phase()
        assert eigen_relation(MonomialOperator(d, (b,) * n), psi) == Phase.root(1, d)
        out = apply(MonomialOperator(d, (b,) * n), psi)
        assert np.allclose(out.amplitudes, np.exp(2j * np.pi / d) * psi.amplitudes)


def test_eigen_relation_none_for_non_eigenvector():
    x_on_first = TensorMonomial((LocalObservable(2, Fraction(0)).monomial(), LocalMonomial.identity(2)))
    assert eigen_relation(x_on_first, ghz_state(2, 2)) is None


def test_integer_sum_vectors_give_root_eigenvalues():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n, d = int(rng.integers(2, 6)), int(rng.integers(2, 5))
        r = [small_rational(rng, 12) for _ in range(n - 1)]
        R = int(rng.integers(-5, 6))
        r.append(Fraction(R) - sum(r))
        op = MonomialOperator(d, tuple(r))
        expected = Phase(Fraction(R % d, d))
        assert ghz_eigenphase(op) == expected
        if d**n <= 1024:
            assert eigen_relation(op, ghz_state(n, d)) == expected


def test_apply_matches_dense_random_operators():
    rng = np.random.default_rng(4)
    for _ in range(500):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(1, int(np.log(256) / np.log(d)) + 1))
        op = MonomialOperator(d, tuple(small_rational(rng) for _ in range(n)))
        v = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
        psi = StateVector(n, d, v / np.linalg.norm(v))
        out = apply(op, psi).amplitudes
        assert np.max(np.abs(out - op.dense() @ psi.amplitudes)) <= 1e-12
        assert abs(np.linalg.norm(out) - 1) <= 1e-12


def test_dense_check_mode_flags_disagreement(monkeypatch):
    op = MonomialOperator(2, (Fraction(1, 3), Fraction(0)))
    psi = ghz_state(2, 2)
    with dense_checks():
        apply(op, psi)
        monkeypatch.setattr(type(op), "dense", lambda self: np.eye(4))
        with pytest.raises(ConsistencyError):
            apply(op, psi)


def test_operator_products():
    op = MonomialOperator(3, (Fraction(1, 3), Fraction(-2, 7), Fraction(5, 4)))
    assert operator_product(op, op.adjoint()).is_identity
    x = MonomialOperator(2, (Fraction(0),))
    y = MonomialOperator(2, (Fraction(-1, 2),))
    assert operator_product(x, x).is_identity
    yx = operator_product(y, x)
    assert yx.is_diagonal
    assert np.allclose(yx.dense(), -1j * PZ)
    assert np.allclose(yx.dense(), PY @ PX)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(max_denominator=20), min_size=1, max_size=4), st.integers(2, 4))
def test_product_matches_dense_product(params, d):
    a = MonomialOperator(d, tuple(params))
    b = MonomialOperator(d, tuple(reversed(params)))
    assert np.allclose(operator_product(a, b).dense(), a.dense() @ b.dense(), atol=1e-12)


def test_operator_serialization_round_trip():
    op = MonomialOperator(2, (Fraction(0), Fraction(-1, 6), Fraction(1, 36)))
    assert MonomialOperator.from_dict(op.to_dict()) == op
    assert op.to_dict()["params"] == ["0/1", "-1/6", "1/36"]


def test_state_validation():
    with pytest.raises(ContractError):
        StateVector(2, 2, np.ones(3))
    psi = basis_state(2, 3, (1, 2))
    assert psi.amplitudes[5] == 1
    assert StateVector.from_dict(psi.to_dict()).amplitudes.tolist() == psi.amplitudes.tolist()


def test_phased_ghz_state():
    psi = ghz_state(3, 2, (Phase(), Phase(Fraction(1, 2))))
    assert np.allclose(psi.amplitudes[[0, 7]], np.array([1, -1]) / np.sqrt(2))
