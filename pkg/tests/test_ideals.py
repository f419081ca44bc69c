import threading

import numpy as np
import pytest

from ncball.fock import creation_tuple
from ncball.freealg import FreePoly, MatrixTuple, eval_poly, random_poly, row_norm
from ncball.ideals import (
    GradedIdeal,
    commutator_ideal,
    commutatorize,
    compressed_shift,
    compression_norm,
    fiber,
    graded_basis,
    matrix_span_subspace,
    membership,
    membership_residual,
    nullstellensatz_witness,
    quotient_norm_estimate,
    random_ideal,
    subproduct_residual,
    verify_unitary_equivalence,
)

from oracles import ideal_degree_rank


def z(i, d=2):
    return FreePoly.var(i, d)


COMM = commutator_ideal(2)
SWAP = np.array([[0, 1], [1, 0]])


def test_commutator_ideal_dimensions_match_exact_rank():
    gens = [z(0) * z(1) - z(1) * z(0)]
    for n in range(5):
        assert COMM.dim(n) == ideal_degree_rank(2, gens, n)
    assert COMM.dim(2) == 1
    assert COMM.dim(3) == 4


@pytest.mark.parametrize("seed", range(6))
def test_random_integer_ideals_match_exact_rank(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    J = random_ideal(rng, d, max_degree=2, integer=True)
    for n in range(4):
        assert J.dim(n) == ideal_degree_rank(d, J.generators, n)


def test_zero_ideal():
    J = GradedIdeal(3)
    assert all(J.dim(n) == 0 for n in range(4))
    assert fiber(J, 2).dim == 9
    J = GradedIdeal(2, [FreePoly(2)])
    assert J.generators == ()


def test_basis_is_orthonormal(rng):
    J = random_ideal(rng, 3, max_degree=2)
    for n in range(4):
        B = graded_basis(J, n)
        np.testing.assert_allclose(B.conj().T @ B, np.eye(B.shape[1]), atol=1e-12)


def test_fiber_examples():
    assert [fiber(COMM, n).dim for n in range(6)] == [1, 2, 3, 4, 5, 6]
    J = GradedIdeal(2, [z(0)])
    for n in range(1, 5):
        X = fiber(J, n).basis
        target = FreePoly.monomial((1,) * n, 2).to_vector(n)
        assert X.shape[1] == 1
        assert abs(abs(np.vdot(X[:, 0], target)) - 1) < 1e-12
    assert fiber(GradedIdeal(2), 0).dim == 1


def test_fiber_complements(rng):
    J = random_ideal(rng, 3)
    for n in range(4):
        B, X = graded_basis(J, n), fiber(J, n).basis
        assert B.shape[1] + X.shape[1] == 3**n
        assert np.linalg.norm(B.conj().T @ X) < 1e-12


def test_subproduct_inclusion(rng):
    for _ in range(3):
        J = random_ideal(rng, 2)
        for m in range(4):
            for n in range(4 - m):
                assert subproduct_residual(J, m, n) <= 1e-10


def test_non_homogeneous_generator_rejected():
    with pytest.raises(ValueError, match="generator 1 is not homogeneous"):
        GradedIdeal(2, [z(0), z(0) + z(0) * z(1)])


def test_compressed_shift_of_zero_ideal_is_creation_tuple():
    S = compressed_shift(GradedIdeal(2), 3)
    # fibers of the zero ideal are the identity, so the blocks reproduce the shift exactly
    assert S.allclose(creation_tuple(2, 3), atol=1e-14)


def test_compressed_shift_of_commutator_ideal_commutes():
    S = compressed_shift(COMM, 5)
    assert np.linalg.norm(S[0] @ S[1] - S[1] @ S[0], 2) <= 1e-12


def test_compressed_shift_nilpotent_jordan():
    J = GradedIdeal(1, [z(0, 1) ** 3])
    for N in (3, 4, 6):
        S = compressed_shift(J, N)
        np.testing.assert_allclose(S[0], np.diag([1, 1], -1), atol=1e-14)


def test_membership_examples():
    assert membership(COMM, z(0) * (z(1) * z(0) - z(0) * z(1)))
    assert not membership(COMM, z(0) * z(1))
    assert membership(COMM, FreePoly(2))
    assert membership(random_ideal(np.random.default_rng(3), 3), FreePoly(3))
    with pytest.raises(ValueError, match="homogeneous"):
        membership(COMM, z(0) + z(0) * z(1))


def test_membership_agrees_with_compression(rng):
    for _ in range(20):
        J = random_ideal(rng, 2)
        m = int(rng.integers(1, 4))
        p = random_poly(rng, 2, m, homogeneous=True)
        member = membership(J, p)
        cn = compression_norm(J, p)
        assert member == (cn <= 1e-10 * p.norm())
        if not member:
            assert cn >= 1e-6


def test_witness_examples():
    w = nullstellensatz_witness(COMM, z(0) * z(1), 0.5)
    assert not w.member
    X = w.point
    assert np.linalg.norm(X[0] @ X[1] - X[1] @ X[0], 2) <= 1e-12
    assert np.linalg.norm(eval_poly(z(0) * z(1), X), 2) > 0
    assert w.row_norm < 1
    assert w.value_norm >= 0.5**2 * (1 - 1e-6) * w.residual

    w = nullstellensatz_witness(GradedIdeal(2, [z(0)]), z(0))
    assert w.member and w.point is None
    np.testing.assert_allclose(np.abs(w.certificate), [1.0])

    J = GradedIdeal(1, [z(0, 1) ** 3])
    w = nullstellensatz_witness(J, z(0, 1) ** 2, 0.9)
    X = w.point[0]
    np.testing.assert_allclose(X, 0.9 * np.diag([1, 1], -1), atol=1e-14)
    np.testing.assert_allclose(np.linalg.matrix_power(X, 3), 0)
    assert np.linalg.norm(X @ X) > 0


def test_witness_rejects_bad_t():
    for t in (0, 1, -0.2, 1.5):
        with pytest.raises(ValueError):
            nullstellensatz_witness(COMM, z(0) * z(1), t)


def test_quotient_norm_examples():
    assert quotient_norm_estimate(GradedIdeal(2), z(0) + z(1), 1) == pytest.approx(np.sqrt(2))
    sym = 0.5 * (z(0) * z(1) + z(1) * z(0))
    assert sym.norm() == pytest.approx(1 / np.sqrt(2))
    assert quotient_norm_estimate(COMM, z(0) * z(1), 2) == pytest.approx(sym.norm(), abs=1e-12)
    for J in (GradedIdeal(2), COMM, random_ideal(np.random.default_rng(0), 2)):
        assert quotient_norm_estimate(J, FreePoly.const(1, 2), 3) == pytest.approx(1)
    with pytest.raises(ValueError):
        quotient_norm_estimate(COMM, z(0) * z(1), 1)


def test_quotient_norm_nondecreasing(rng):
    J = random_ideal(rng, 2)
    p = random_poly(rng, 2, 2)
    vals = [quotient_norm_estimate(J, p, N) for N in range(2, 6)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_quotient_norm_matrix_coefficients():
    A = np.array([[0, 1], [0, 0]])
    val = quotient_norm_estimate(GradedIdeal(2), {(0,): A, (1,): A.T}, 2)
    # T^*T = I ⊗ (A^*A + (A^T)^*A^T) = I below the top degree
    assert val == pytest.approx(1, abs=1e-12)


def test_matrix_span_examples():
    assert matrix_span_subspace([], d=2).shape == (2, 0)
    E12, E21 = np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]])
    assert matrix_span_subspace([MatrixTuple([E12, E21])]).shape == (2, 2)
    rng = np.random.default_rng(5)
    pts = []
    for _ in range(3):
        A = rng.standard_normal((3, 3))
        pts.append(MatrixTuple([A, A]))
    V = matrix_span_subspace(pts)
    assert V.shape == (2, 1)
    assert abs(abs(np.vdot(V[:, 0], np.array([1, 1]) / np.sqrt(2))) - 1) < 1e-12
    with pytest.raises(ValueError):
        matrix_span_subspace([MatrixTuple.zeros(2, 2), MatrixTuple.zeros(2, 3)])


def test_matrix_span_contains_points(rng):
    # points supported on a random complex 2-plane of C^3
    basis = np.linalg.qr(rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))[0]
    pts = []
    for _ in range(2):
        coeff = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        pts.append(MatrixTuple(np.einsum("ja,abc->jbc", basis, coeff)))
    V = matrix_span_subspace(pts)
    assert V.shape == (3, 2)
    for X in pts:
        entries = X.matrices.reshape(3, -1)
        assert np.linalg.norm(entries - V @ (V.conj().T @ entries)) < 1e-12


def test_unitary_equivalence_examples():
    assert verify_unitary_equivalence(np.eye(2), COMM, COMM, 3)
    J1, J2 = GradedIdeal(2, [z(0)]), GradedIdeal(2, [z(1)])
    assert verify_unitary_equivalence(SWAP, J1, J2, 3)
    assert not verify_unitary_equivalence(np.eye(2), J1, J2, 3)
    with pytest.raises(ValueError, match="unitary"):
        verify_unitary_equivalence(np.diag([1, 2]), J1, J2, 3)
    with pytest.raises(ValueError):
        verify_unitary_equivalence(SWAP, COMM, COMM, 1)


def test_unitary_equivalence_of_rotated_ideal(rng):
    from ncball.freealg import random_unitary

    U = random_unitary(rng, 2)
    # image of z_1^2 under the coordinate change: (U e_0) ⊗ (U e_0)
    g = FreePoly.from_vector(np.kron(U[:, 0], U[:, 0]), 2, 2)
    J1, J2 = GradedIdeal(2, [z(0) * z(0)]), GradedIdeal(2, [g])
    assert verify_unitary_equivalence(U, J1, J2, 4)
    assert not verify_unitary_equivalence(np.eye(2), J1, J2, 4)


def test_commutatorize_examples():
    J = commutatorize(GradedIdeal(2))
    assert [fiber(J, n).dim for n in range(5)] == [1, 2, 3, 4, 5]
    J2 = commutatorize(J)
    assert [J2.dim(n) for n in range(5)] == [J.dim(n) for n in range(5)]
    Jc = commutatorize(GradedIdeal(2, [z(0) * z(0)]))
    assert membership(Jc, z(0) * z(1) * z(0) - z(0) * z(0) * z(1))
    S = compressed_shift(Jc, 4)
    assert np.linalg.norm(S[0] @ S[1] - S[1] @ S[0], 2) <= 1e-12


def test_cache_consistent_under_threads(rng):
    J = random_ideal(rng, 3)
    results = []

    def work():
        results.append([J.basis(n).copy() for n in range(4)])

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results[1:]:
        for a, b in zip(results[0], r):
            np.testing.assert_array_equal(a, b)


def test_witness_row_norm_matches_shift(rng):
    J = random_ideal(rng, 2)
    p = random_poly(rng, 2, 3, homogeneous=True)
    w = nullstellensatz_witness(J, p, 0.7)
    if not w.member:
        assert w.row_norm == pytest.approx(0.7 * row_norm(compressed_shift(J, 3)), rel=1e-12)
        assert membership_residual(J, p) == pytest.approx(w.residual)


def test_homogeneous_quotient_norm_matches_dense_evaluation(rng):
    for _ in range(5):
        J = random_ideal(rng, 2)
        p = random_poly(rng, 2, int(rng.integers(1, 3)), homogeneous=True)
        for N in (p.degree, p.degree + 2):
            dense = np.linalg.norm(eval_poly(p, compressed_shift(J, N)), 2)
            assert quotient_norm_estimate(J, p, N) == pytest.approx(dense, rel=1e-12, abs=1e-14)
