"""PVM validation, relation membership, equality certificates, strategies.

The independent oracle for membership: over a shared eigenbasis with label
assignments, the projector tuple lies in the quantum relation exactly when
every eigenvector's label tuple lies in the classical relation.
"""

from itertools import product

import numpy as np
import pytest

from cspgames.errors import NotAHomomorphismError
from cspgames.quantum import (
    PVM,
    alpha_threshold,
    close_pvm_equality,
    commutation_residual,
    deterministic_pvm_tuple,
    deterministic_quantum_strategy,
    equality_experiment,
    find_certifying_partition,
    marginals_from_witness,
    maximally_entangled_state,
    projection_norm_table,
    pvm_from_eigenbasis,
    pvm_tuple_from_classical,
    pvms_commute,
    quantum_relation_membership,
    quantum_strategy_from_hom,
    quantum_strategy_from_json,
    quantum_strategy_to_json,
    random_unitary,
    spectral_norm,
    validate_pvm,
    verify_perfect_quantum,
)
from cspgames.structures import find_homomorphism, make_named


def diag_pvm():
    return PVM((0, 1), (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))


def plus_pvm():
    plus = np.full((2, 2), 0.5, dtype=complex)
    return PVM((0, 1), (plus, np.eye(2) - plus))


# --- validation ---


def test_spectral_norm_is_largest_singular_value():
    assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)
    assert spectral_norm(np.zeros((2, 2))) == 0.0


def test_validate_pvm_accepts_eigenbasis_constructions():
    rng = np.random.default_rng(2)
    for _ in range(25):
        d = int(rng.integers(2, 9))
        basis = random_unitary(d, rng)
        labels = tuple(range(int(rng.integers(2, d + 1))))
        assignment = [labels[i] for i in rng.integers(0, len(labels), size=d)]
        v = validate_pvm(pvm_from_eigenbasis(basis, assignment, labels))
        assert v.ok
        assert max(
            v.hermitian_residual,
            v.idempotency_residual,
            v.orthogonality_residual,
            v.completeness_residual,
        ) <= 1e-9


def test_validate_pvm_flags_each_defect():
    not_herm = PVM((0, 1), (np.array([[0.5, 1.0], [0.0, 0.5]]), np.array([[0.5, -1.0], [0.0, 0.5]])))
    assert validate_pvm(not_herm).hermitian_residual > 1e-6
    not_idem = PVM((0, 1), (0.5 * np.eye(2), 0.5 * np.eye(2)))
    assert validate_pvm(not_idem).idempotency_residual > 1e-6
    incomplete = PVM((0, 1), (np.diag([1.0, 0.0]), np.zeros((2, 2))))
    assert validate_pvm(incomplete).completeness_residual > 1e-6
    overlapping = PVM((0, 1), (np.diag([1.0, 0.0]), np.eye(2)))
    assert validate_pvm(overlapping).orthogonality_residual > 1e-6


def test_pvm_rejects_malformed_input():
    with pytest.raises(ValueError):
        PVM((0, 0), (np.eye(2), np.zeros((2, 2))))
    with pytest.raises(ValueError):
        PVM((0, 1), (np.eye(2), np.zeros((3, 3))))


def test_commutation_residual_known_pair():
    # diagonal vs plus-state projectors: commutator norm is exactly 1/2
    assert commutation_residual(diag_pvm(), plus_pvm()) == pytest.approx(0.5)
    assert not pvms_commute(diag_pvm(), plus_pvm())
    assert pvms_commute(diag_pvm(), diag_pvm())


# --- membership ---


def test_membership_accepts_classical_tuples():
    y = make_named("nae", 2)
    rel = y.relation("R")
    for ybar in rel:
        pvms, joint = pvm_tuple_from_classical(ybar, y, "R", dim=3)
        got = quantum_relation_membership(pvms, rel)
        assert got is not None
        assert ybar in got.outcomes


def test_membership_rejects_off_relation_tuples():
    y = make_named("one_in_three")
    rel = y.relation("R")
    labels = (0, 1)
    for ybar in product((0, 1), repeat=3):
        if ybar in rel:
            continue
        pvms = deterministic_pvm_tuple(ybar, labels, dim=2)
        assert quantum_relation_membership(pvms, rel) is None


def test_membership_rejects_noncommuting_tuples():
    rel = tuple(product((0, 1), repeat=2))  # full relation: only commutation can fail
    assert quantum_relation_membership((diag_pvm(), plus_pvm()), rel) is None


def eigenlabel_member(assignments, rel):
    """Oracle: every eigenvector's label tuple must lie in the relation."""
    return all(labels in rel for labels in zip(*assignments))


def test_membership_agrees_with_eigenlabel_oracle():
    rng = np.random.default_rng(31)
    for _ in range(60):
        d = int(rng.integers(2, 4))
        arity = int(rng.integers(2, 4))
        labels = (0, 1)
        basis = random_unitary(d, rng)
        assignments = [
            tuple(int(b) for b in rng.integers(0, 2, size=d)) for _ in range(arity)
        ]
        pvms = tuple(pvm_from_eigenbasis(basis, a, labels) for a in assignments)
        all_tuples = list(product(labels, repeat=arity))
        rel = tuple(t for t in all_tuples if rng.random() < 0.5)
        expected = eigenlabel_member(assignments, rel)
        assert (quantum_relation_membership(pvms, rel) is not None) == expected


def test_witness_marginals_rebuild_the_inputs():
    y = make_named("clique", 3)
    rel = y.relation("E")
    pvms, joint = pvm_tuple_from_classical((0, 1), y, "E", dim=2)
    margins = marginals_from_witness(joint, tuple(range(3)), 2)
    for pos in range(2):
        for lab in range(3):
            diff = spectral_norm(pvms[pos].projector(lab) - margins[pos].projector(lab))
            assert diff <= 1e-8


def test_classical_tuple_must_be_in_relation():
    y = make_named("directed_edge")
    with pytest.raises(ValueError):
        pvm_tuple_from_classical((1, 1), y, "E", dim=2)


# --- closeness certificates ---


def test_alpha_threshold_values():
    assert alpha_threshold(2) == pytest.approx(0.9659258262890683)
    assert alpha_threshold(3) == pytest.approx(0.9855985596534887)
    assert alpha_threshold(2) < alpha_threshold(3) < alpha_threshold(10) < 1.0


def test_projection_norm_table_on_eigen_pvm():
    rng = np.random.default_rng(5)
    basis = random_unitary(4, rng)
    assignment = [0, 1, 0, 1]
    pvm = pvm_from_eigenbasis(basis, assignment, (0, 1))
    table = projection_norm_table(pvm, basis)
    assert table.shape == (2, 4)
    for col, lab in enumerate(assignment):
        assert table[lab, col] == pytest.approx(1.0)
        assert table[1 - lab, col] == pytest.approx(0.0, abs=1e-9)


def test_equal_pairs_certify_and_unequal_pairs_never_do():
    rng = np.random.default_rng(9)
    for d in (2, 3, 4):
        basis = random_unitary(d, rng)
        assignment = [int(v) for v in rng.integers(0, 2, size=d)]
        p = pvm_from_eigenbasis(basis, assignment, (0, 1))
        q = pvm_from_eigenbasis(basis, assignment, (0, 1))
        tau = find_certifying_partition(p, q, basis)
        assert tau is not None
        cert = close_pvm_equality(p, q, basis, tau)
        assert cert.certified
        assert cert.max_difference <= 1e-9

        other = list(assignment)
        other[0] = 1 - other[0]
        q2 = pvm_from_eigenbasis(basis, other, (0, 1))
        assert find_certifying_partition(p, q2, basis) is None
        # no outcome labeling of the columns certifies an unequal pair
        for labeling in product((0, 1), repeat=d):
            tau = {
                s: tuple(i for i in range(d) if labeling[i] == s) for s in (0, 1)
            }
            cert = close_pvm_equality(p, q2, basis, tau)
            assert not cert.certified


def test_equality_experiment_is_clean():
    stats = equality_experiment(3, n_outcomes=2, trials=40, seed=1)
    assert stats["trials"] == 40
    assert stats["equal_certified"] == 20
    assert stats["unequal_uncertified"] == 20
    assert stats["false_certifications"] == 0
    assert stats["missed_equalities"] == 0


# --- strategies ---


def test_quantum_strategy_from_hom_is_perfect():
    x, y = make_named("clique", 2), make_named("clique", 3)
    h = find_homomorphism(x, y)
    s = quantum_strategy_from_hom(h, x, y, dim=2)
    verdict = verify_perfect_quantum(x, y, s)
    assert verdict.perfect


def test_quantum_strategy_from_non_hom_refused():
    x, y = make_named("clique", 2), make_named("clique", 3)
    with pytest.raises(NotAHomomorphismError):
        quantum_strategy_from_hom((0, 0), x, y)


def test_tampered_quantum_strategy_reports_counterexample():
    x = make_named("clique", 2)
    s = deterministic_quantum_strategy((0, 0), x, x, dim=2)
    verdict = verify_perfect_quantum(x, x, s)
    assert not verdict.perfect
    assert verdict.counterexample is not None
    assert verdict.counterexample.reason in ("plausibility", "consistency")


def test_maximally_entangled_state_is_normalized():
    for d in (2, 3, 5):
        psi = maximally_entangled_state(d)
        assert np.vdot(psi, psi).real == pytest.approx(1.0)


def test_quantum_strategy_json_round_trip():
    x, y = make_named("clique", 2), make_named("clique", 3)
    s = quantum_strategy_from_hom(find_homomorphism(x, y), x, y, dim=2)
    again = quantum_strategy_from_json(quantum_strategy_to_json(s))
    assert again.dim == s.dim
    assert np.allclose(again.psi, s.psi)
    assert verify_perfect_quantum(x, y, again).perfect
