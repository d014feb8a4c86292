from fractions import Fraction as F

import numpy as np
import pytest

from ghzforge.config import Budgets
from ghzforge.errors import ContractError, ResourceError
from ghzforge.genuine import (
    Rejection,
    commutation_phase,
    common_eigenstate,
    genuineness_check,
    joint_eigenspaces,
    pair_map,
    restrict,
    verify_witness,
)
from ghzforge.lhv import lhv_search
from ghzforge.paradox import (
    ParadoxInstance,
    cyclic_shift,
    mermin_embedded_instance,
    mermin_instance,
    sigma_of,
    theorem1_instance,
    theorem2_vector,
)
from ghzforge.qudit import MonomialOperator, ghz_state

PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]])
PZ = np.diag([1.0, -1.0]).astype(complex)


def test_pair_map_six_qubit_examples():
    assert pair_map(1, 1, 6, 2) == 4
    assert pair_map(1, 2, 6, 2) == 3


@pytest.mark.parametrize("n", range(3, 9))
def test_pair_map_matches_constructed_vectors(n):
    r = theorem2_vector(n)
    sigma = sigma_of(n)
    b = F(1 - 2, n)
    rows = [cyclic_shift(r, k) for k in range(n)]
    for j in range(1, n + 1):
        for k in range(n):
            assert pair_map(j, pair_map(j, k, n, sigma), n, sigma) == k
            y = rows[k][j - 1]
            if y in (0, b):
                continue
            holders = {q for q in range(n) if rows[q][j - 1] == y}
            assert holders == {k, pair_map(j, k, n, sigma)}


def test_pair_map_rejects_bad_indices():
    with pytest.raises(ContractError):
        pair_map(0, 1, 6, 2)
    with pytest.raises(ContractError):
        pair_map(1, 6, 6, 2)


def test_restrict_examples():
    full = restrict(mermin_embedded_instance(), (1, 2, 3), (0, 1, 2, 3))
    assert full
    assert full.operators == mermin_instance().observables
    inst4 = theorem1_instance(theorem2_vector(4), 2)
    rej = restrict(inst4, (1, 2, 3), (0,))
    assert isinstance(rej, Rejection) and not rej


def test_commutation_phase():
    x = MonomialOperator(2, (F(0),))
    y = MonomialOperator(2, (F(-1, 2),))
    assert commutation_phase(x, y).value == F(1, 2)
    assert not commutation_phase(x, x)
    xx = MonomialOperator(2, (F(0), F(0)))
    yy = MonomialOperator(2, (F(-1, 2), F(-1, 2)))
    assert not commutation_phase(xx, yy)


def test_oracle_non_commuting_pair():
    assert common_eigenstate([PX, PY]) is None


def test_oracle_bell_state():
    v, lams = common_eigenstate([np.kron(PX, PX), np.kron(PZ, PZ)])
    assert np.allclose(lams, [1, 1])
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert abs(abs(np.vdot(bell, v)) - 1) < 1e-10


def test_oracle_finds_ghz_state_for_full_instance():
    for inst in (theorem1_instance(theorem2_vector(n), 2) for n in (3, 4, 5)):
        leaves = joint_eigenspaces(inst.observables)
        psi = ghz_state(inst.n, 2).amplitudes
        expected = tuple(t.to_complex() for t in inst.targets)
        match = [Q for Q, lams in leaves if np.allclose(lams, expected)]
        assert len(match) == 1
        Q = match[0]
        assert np.linalg.norm(Q @ (Q.conj().T @ psi) - psi) < 1e-10


def test_oracle_soundness_post_hoc():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n, d = 3, int(rng.integers(2, 4))
        ops = [MonomialOperator(d, tuple(F(int(x), 2 * d) for x in rng.integers(-d, d, n))) for _ in range(3)]
        for Q, lams in joint_eigenspaces(ops):
            for k in range(Q.shape[1]):
                v = Q[:, k]
                for op, lam in zip(ops, lams):
                    assert np.linalg.norm(op.dense() @ v - lam * v) <= 1e-10


def test_oracle_completeness_on_commuting_families():
    rng = np.random.default_rng(9)
    for _ in range(30):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(1, int(np.log(64) / np.log(d)) + 1))
        base = MonomialOperator(d, tuple(F(int(rng.integers(-12, 13)), 12) for _ in range(n))).dense()
        family = [np.linalg.matrix_power(base, int(p)) for p in rng.integers(0, 2 * d, 3)]
        found = common_eigenstate(family)
        assert found is not None
        v, lams = found
        for U, lam in zip(family, lams):
            assert np.linalg.norm(U @ v - lam * v) <= 1e-10


def test_control_is_not_genuine():
    verdict = genuineness_check(mermin_embedded_instance())
    assert not verdict.genuine
    w = verdict.witness
    assert w.beta == (1, 2, 3)
    assert w.instance.observables == mermin_instance().observables
    assert verify_witness(w)
    assert lhv_search(w.instance).count == 0
    assert verdict.to_dict()["witness"]["beta"] == [1, 2, 3]


def test_sweep_is_deterministic():
    a = genuineness_check(mermin_embedded_instance())
    b = genuineness_check(mermin_embedded_instance())
    assert a.to_dict()["witness"]["alpha"] == b.to_dict()["witness"]["alpha"]
    assert a.candidates_checked == b.candidates_checked


@pytest.mark.parametrize("n", [3, 4, 5])
def test_theorem2_instances_are_genuine(n):
    verdict = genuineness_check(theorem1_instance(theorem2_vector(n), 2))
    assert verdict.genuine and verdict.witness is None
    assert verdict.candidates_checked > 0


def test_embedding_on_middle_parties_is_found():
    base = mermin_instance()
    ops = tuple(MonomialOperator(2, (F(0),) + op.params + (F(0),)) for op in base.observables)
    inst = ParadoxInstance(5, 2, ops, base.targets, certified=False, state_phases=base.state_phases)
    assert inst.verify_targets() == []
    verdict = genuineness_check(inst)
    assert not verdict.genuine
    assert verdict.witness.beta == (2, 3, 4)
    assert verify_witness(verdict.witness)


def test_sweep_limits():
    inst = theorem1_instance(theorem2_vector(6), 2)
    with pytest.raises(ResourceError):
        genuineness_check(inst, budgets=Budgets(sweep=5))
    with pytest.raises(ResourceError):
        genuineness_check(inst, budgets=Budgets(candidates=100))
