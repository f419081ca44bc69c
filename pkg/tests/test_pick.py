import numpy as np
import pytest

from ncball.fock import creation_tuple
from ncball.freealg import FreePoly, MatrixTuple, eval_poly, random_poly, random_tuple
from ncball.ideals import GradedIdeal, commutator_ideal, compressed_shift, random_ideal
from ncball.pick import (
    PickProblem,
    classical_pick_matrix,
    dbr_choi,
    feasible,
    homogeneous_multiplier_norm,
    sup_norm_lower_bound,
    variety_samples,
)

from oracles import pick_matrix


def z(i, d=2):
    return FreePoly.var(i, d)


def scalar_node(x):
    return MatrixTuple([[[x]]])


def test_zero_target_is_szego_choi(rng):
    Z = random_tuple(rng, 2, 3, 0.7)
    res = feasible(PickProblem([Z], [np.zeros((3, 3))]))
    assert res.feasible and res.margin >= -1e-10


def test_single_scalar_node_is_always_feasible():
    # one node can be matched by a constant, so only the 1x1 Pick entry matters
    for w in (0.5, 0.9):
        res = feasible(PickProblem([scalar_node(0.5)], [[[w]]]))
        assert res.feasible
        assert res.margin == pytest.approx((1 - w**2) / (1 - 0.25), rel=1e-12)


def test_schwarz_pick_violation_detected():
    problem = PickProblem([scalar_node(0.0), scalar_node(0.5)], [[[0.0]], [[0.9]]])
    res = feasible(problem)
    assert not res.feasible
    assert np.linalg.eigvalsh(pick_matrix([0, 0.5], [0, 0.9]))[0] < 0
    problem = PickProblem([scalar_node(0.0), scalar_node(0.5)], [[[0.0]], [[0.5]]])
    assert feasible(problem).feasible


def test_constant_unit_target_is_feasible(rng):
    nodes = [random_tuple(rng, 2, 2, 0.5), random_tuple(rng, 2, 1, 0.3)]
    res = feasible(PickProblem(nodes, [np.eye(2), np.eye(1)]))
    assert res.feasible and res.margin >= -1e-9


def test_homogeneous_target_feasibility(rng):
    Z = random_tuple(rng, 2, 3, 0.5)
    p = (z(0) + z(1)) / np.sqrt(2)
    assert homogeneous_multiplier_norm(GradedIdeal(2), z(0) + z(1)) == pytest.approx(np.sqrt(2))
    assert feasible(PickProblem.from_poly(p, [Z])).feasible
    assert not feasible(PickProblem.from_poly(p, [Z], 1.2)).feasible


def test_choi_is_hermitian(rng):
    nodes = [random_tuple(rng, 2, 2, 0.6), random_tuple(rng, 2, 2, 0.4)]
    p = random_poly(rng, 2, 2)
    C = dbr_choi(PickProblem.from_poly(p, nodes, 0.1))
    assert np.linalg.norm(C - C.conj().T, 2) <= 1e-12 * np.linalg.norm(C, 2)


def test_matrix_valued_targets(rng):
    Z = random_tuple(rng, 2, 2, 0.5)
    A0, A1 = np.array([[1, 0], [0, 0]]), np.array([[0, 0], [0, 1]])
    # z_1 ⊗ A0 + z_2 ⊗ A1 is a row contraction: multiplier norm 1
    W = np.kron(Z[0], A0) + np.kron(Z[1], A1)
    assert feasible(PickProblem([Z], [W], e=2)).feasible
    assert not feasible(PickProblem([Z], [1.3 * W], e=2)).feasible
    with pytest.raises(ValueError):
        PickProblem([Z], [W], e=1)


def test_problem_validation(rng):
    with pytest.raises(ValueError, match="row norm"):
        PickProblem([MatrixTuple([[[1.0]]])], [[[0.0]]])
    with pytest.raises(ValueError):
        PickProblem([], [])
    with pytest.raises(ValueError):
        PickProblem([scalar_node(0.1)], [[[0.0]], [[0.0]]])


def test_direct_sum_reduction_consistency(rng):
    nodes = [random_tuple(rng, 2, 2, 0.5), random_tuple(rng, 2, 1, 0.5)]
    p = (z(0) * z(1) + z(1) * z(1)) / np.sqrt(2)
    for s in (0.8, 1.5):
        problem = PickProblem.from_poly(p, nodes, s)
        a, b = feasible(problem), feasible(problem.reduced())
        assert a.feasible == b.feasible
        assert a.margin == pytest.approx(b.margin, abs=1e-12)


def test_margin_monotone_under_scaling(rng):
    for _ in range(5):
        Z = random_tuple(rng, 2, 2, 0.6)
        p = random_poly(rng, 2, 2)
        problem = PickProblem.from_poly(p, [Z])
        margins = [feasible(problem.scaled(s)).margin for s in (1.0, 0.5, 0.0)]
        assert margins[0] <= margins[1] + 1e-12 <= margins[2] + 2e-12


def test_classical_pick_matrix_helper():
    z_, w_ = [0.1, 0.5j, -0.3], [0.2, 0.1, 0.4j]
    np.testing.assert_allclose(classical_pick_matrix(z_, w_), pick_matrix(z_, w_))


def test_homogeneous_multiplier_norm_examples():
    assert homogeneous_multiplier_norm(commutator_ideal(2), z(0) * z(1)) == pytest.approx(1 / np.sqrt(2))
    assert homogeneous_multiplier_norm(commutator_ideal(2), z(0) * z(1) - z(1) * z(0)) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ValueError):
        homogeneous_multiplier_norm(GradedIdeal(2), z(0) + z(0) * z(1))


def test_sup_norm_examples(rng):
    pts = [random_tuple(rng, 2, 2, r) for r in (0.1, 0.4, 0.6)]
    assert sup_norm_lower_bound(FreePoly.const(1, 2), pts) == pytest.approx(1)
    assert sup_norm_lower_bound(z(0), pts) <= 0.6 + 1e-12
    J = GradedIdeal(1, [z(0, 1) ** 3])
    jordan = [compressed_shift(J, 3) * t for t in (0.5, 0.9, 0.99)]
    assert sup_norm_lower_bound(z(0, 1) ** 2, jordan, J) == pytest.approx(0.99**2, rel=1e-12)
    with pytest.raises(ValueError, match="row norm"):
        sup_norm_lower_bound(z(0), [random_tuple(rng, 2, 2, 1.1)])
    with pytest.raises(ValueError, match="variety"):
        sup_norm_lower_bound(z(0), [random_tuple(rng, 2, 2, 0.5)], commutator_ideal(2))


def test_sup_bound_below_multiplier_norm(rng):
    for _ in range(3):
        J = random_ideal(rng, 2)
        p = random_poly(rng, 2, 2, homogeneous=True)
        samples = variety_samples(J, 2, 20, rng)
        assert sup_norm_lower_bound(p, samples, J) <= homogeneous_multiplier_norm(J, p) + 1e-9


def test_truncated_creation_nodes_make_data_rigid():
    # f(t L) pins every Taylor coefficient up to degree N, so 1.01 p is not contractive
    p = (z(0) * z(1) + z(1) * z(0) + z(0) * z(0)) / np.sqrt(3)
    node = creation_tuple(2, 2) * 0.5
    assert feasible(PickProblem.from_poly(p, [node])).feasible
    assert not feasible(PickProblem.from_poly(p, [node], 1.01)).feasible
