"""
Homogeneous two-sided ideals of the free algebra.

A homogeneous ideal ``J`` is determined by its graded pieces ``J_n``, each a
subspace of the ``d**n``-dimensional span of degree-``n`` words.  In word
coordinates, left multiplication by ``z_i`` is ``e_i ⊗ (.)`` and right
multiplication is ``(.) ⊗ e_i``, so

    J_n = C^d ⊗ J_{n-1} + J_{n-1} ⊗ C^d + span(generators of degree n).

Each ``J_n`` is kept as a matrix with orthonormal columns.  The orthogonal
complements ``X(n) = J_n^⊥`` are the fibers of the associated subproduct
system, and the creation tuple compressed to ``⊕ X(n)`` annihilates exactly
the homogeneous polynomials in ``J``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg

from .freealg import FreePoly, MatrixTuple, eval_matrix_poly, eval_poly, row_norm, _check_d

MAX_WORDS = 20000
RANK_TOL = 1e-10
MEMBER_TOL = 1e-10


def _orth(cols: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column span via pivoted QR."""
    if cols.shape[1] == 0:
        return np.zeros((cols.shape[0], 0), dtype=complex)
    q, r, _ = scipy.linalg.qr(cols, mode="economic", pivoting=True)
    scale = np.max(np.linalg.norm(cols, axis=0))
    if scale == 0:
        return np.zeros((cols.shape[0], 0), dtype=complex)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > tol * scale))
    return q[:, :rank]


def _complement(basis: np.ndarray) -> np.ndarray:
    m, r = basis.shape
    if r == 0:
        return np.eye(m, dtype=complex)
    q, _ = scipy.linalg.qr(basis, mode="full")
    return q[:, r:]


def _check_words(d: int, n: int):
    if d**n > MAX_WORDS:
        raise ValueError(f"degree {n} with d={d} needs {d**n} words > {MAX_WORDS}")


class GradedIdeal:
    """Two-sided ideal generated by homogeneous polynomials.

    Per-degree bases are computed on first use and cached.

    Parameters
    ----------
    d : int
        Number of variables.
    generators : sequence of FreePoly
        Homogeneous generators; zero polynomials are ignored.

    Raises
    ------
    ValueError
        If a generator is not homogeneous or lives in a different ``d``.
    """

    def __init__(self, d: int, generators: Sequence[FreePoly] = ()):
        self.d = _check_d(d)
        gens = []
        for k, g in enumerate(generators):
            if g.d != self.d:
                raise ValueError(f"generator {k} has d={g.d}, expected {self.d}")
            if not g.is_homogeneous():
                raise ValueError(f"generator {k} is not homogeneous: {g!r}")
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self._bases: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    @property
    def max_generator_degree(self) -> int:
        return max((g.degree for g in self.generators), default=0)

    def basis(self, n: int) -> np.ndarray:
        """Orthonormal columns spanning ``J_n`` (shape ``d**n x dim J_n``)."""
        return self._pair(n)[0]

    def fiber_basis(self, n: int) -> np.ndarray:
        """Orthonormal columns spanning the complement ``X(n)`` of ``J_n``."""
        return self._pair(n)[1]

    def _pair(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        if n < 0:
            raise ValueError("degree must be nonnegative")
        _check_words(self.d, n)
        with self._lock:
            start = max((k for k in self._bases if k <= n), default=-1)
            for k in range(start + 1, n + 1):
                B, Q = self._step(k)
                B.setflags(write=False)
                Q.setflags(write=False)
                self._bases[k] = (B, Q)
            return self._bases[n]

    def _step(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        gens = [g.to_vector(k)[:, None] / g.norm() for g in self.generators if g.degree == k]
        if k == 0:
            B = _orth(np.hstack(gens)) if gens else np.zeros((1, 0), dtype=complex)
            return B, _complement(B)
        prev_B, prev_Q = self._bases[k - 1]
        eye = np.eye(self.d)
        # J_k ⊇ C^d ⊗ J_{k-1}, so X(k) = {U c : c ⊥ rows of M} with U spanning C^d ⊗ X(k-1)
        U = np.kron(eye, prev_Q)
        left = np.kron(eye, prev_B)
        cons = np.hstack([np.kron(prev_B, eye)] + gens)
        if U.shape[1] == 0 or cons.shape[1] == 0:
            return left, U
        M = cons.conj().T @ U
        _, s, vh = scipy.linalg.svd(M, full_matrices=True)
        rank = int(np.sum(s > RANK_TOL))
        V = vh.conj().T
        return np.hstack([left, U @ V[:, :rank]]), U @ V[:, rank:]

    def dim(self, n: int) -> int:
        return self.basis(n).shape[1]

    def fiber(self, n: int) -> "SubproductFiber":
        return fiber(self, n)

    def __repr__(self):
        return f"GradedIdeal(d={self.d}, generators={len(self.generators)})"


@dataclass(frozen=True)
class SubproductFiber:
    """Orthonormal basis of ``X(n)``, the complement of ``J_n`` among degree-``n`` words."""

    degree: int
    basis: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def graded_basis(J: GradedIdeal, n: int) -> np.ndarray:
    return J.basis(n)


def fiber(J: GradedIdeal, n: int) -> SubproductFiber:
    return SubproductFiber(n, J.fiber_basis(n))


def subproduct_residual(J: GradedIdeal, m: int, n: int) -> float:
    """Norm of the part of ``X(m+n)`` outside ``X(m) ⊗ X(n)``."""
    big = fiber(J, m + n).basis
    prod = np.kron(fiber(J, m).basis, fiber(J, n).basis)
    if big.shape[1] == 0:
        return 0.0
    leak = big - prod @ (prod.conj().T @ big)
    return float(np.linalg.norm(leak, 2)) if leak.size else 0.0


def fiber_bases(J: GradedIdeal, N: int) -> list[np.ndarray]:
    return [fiber(J, n).basis for n in range(N + 1)]


def compressed_shift(J: GradedIdeal, N: int) -> MatrixTuple:
    """Creation tuple compressed to ``⊕_{n <= N} X(n)``.

    The block from degree ``n`` to degree ``n + 1`` of the ``i``-th
    coordinate is ``Q_{n+1}^* (e_i ⊗ Q_n)``; degree ``N`` maps to zero.
    """
    if N < 1:
        raise ValueError("truncation degree must be at least 1")
    Qs = fiber_bases(J, N)
    sizes = [Q.shape[1] for Q in Qs]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    dim = int(offsets[-1])
    eye = np.eye(J.d)
    mats = np.zeros((J.d, dim, dim), dtype=complex)
    for i in range(J.d):
        for n in range(N):
            block = Qs[n + 1].conj().T @ np.kron(eye[:, i:i + 1], Qs[n])
            mats[i, offsets[n + 1]:offsets[n + 2], offsets[n]:offsets[n + 1]] = block
    return MatrixTuple(mats)


def _homogeneous_degree(p: FreePoly) -> int:
    if not p.is_homogeneous():
        raise ValueError(f"polynomial is not homogeneous: {p!r}")
    return p.degree or 0


def projection(J: GradedIdeal, p: FreePoly) -> tuple[np.ndarray, np.ndarray]:
    """Split homogeneous ``p`` into ideal coordinates and the orthogonal residual.

    Returns
    -------
    coefficients : ndarray
        Coordinates of the projection of ``p`` onto ``J_m`` in the basis ``J.basis(m)``.
    residual : ndarray
        ``p - P_{J_m} p`` in degree-``m`` word coordinates.
    """
    if p.d != J.d:
        raise ValueError(f"polynomial has d={p.d}, ideal has d={J.d}")
    m = _homogeneous_degree(p)
    vec = p.to_vector(m)
    B = J.basis(m)
    coeffs = B.conj().T @ vec
    return coeffs, vec - B @ coeffs


def membership_residual(J: GradedIdeal, p: FreePoly) -> float:
    return float(np.linalg.norm(projection(J, p)[1]))


def membership(J: GradedIdeal, p: FreePoly) -> bool:
    """Whether the homogeneous polynomial ``p`` lies in ``J`` (relative tolerance 1e-10)."""
    return membership_residual(J, p) <= MEMBER_TOL * p.norm()


def compression_norm(J: GradedIdeal, p: FreePoly, N: int | None = None) -> float:
    """``||p(S^(N))||`` with ``N = deg p`` by default."""
    deg = p.degree or 0
    N = max(deg, 1) if N is None else N
    S = compressed_shift(J, N)
    return float(np.linalg.norm(eval_poly(p, S), 2))


@dataclass(frozen=True)
class Witness:
    """Outcome of the homogeneous Nullstellensatz test for one polynomial.

    For a member, ``certificate`` holds the projection coefficients in the
    basis of ``J_m``.  For a non-member, ``point`` is a strict row
    contraction annihilating every generator but not ``p``.
    """

    member: bool
    degree: int
    residual: float
    certificate: np.ndarray | None = field(default=None, repr=False)
    point: MatrixTuple | None = None
    t: float | None = None
    row_norm: float | None = None
    generator_residual: float | None = None
    value_norm: float | None = None


def nullstellensatz_witness(J: GradedIdeal, p: FreePoly, t: float = 0.5) -> Witness:
    """Membership certificate, or a point of the variety of ``J`` where ``p`` is nonzero.

    The point is ``t`` times the compressed shift truncated at ``deg p``.
    """
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    m = _homogeneous_degree(p)
    coeffs, res = projection(J, p)
    residual = float(np.linalg.norm(res))
    if residual <= MEMBER_TOL * p.norm():
        return Witness(True, m, residual, certificate=coeffs)
    X = compressed_shift(J, max(m, 1)) * t
    gen_res = max((float(np.linalg.norm(eval_poly(g, X), 2)) for g in J.generators), default=0.0)
    return Witness(
        False, m, residual,
        point=X, t=t, row_norm=row_norm(X),
        generator_residual=gen_res,
        value_norm=float(np.linalg.norm(eval_poly(p, X), 2)),
    )


def _homogeneous_block_norm(J: GradedIdeal, p: FreePoly, N: int) -> float:
    # J^⊥ is co-invariant, so words in S are compressions of words in L and a
    # degree-m polynomial maps X(n) to X(n+m) by Q_{n+m}^* (p ⊗ I) Q_n
    if p.is_zero():
        return 0.0
    m = p.degree
    vec = p.to_vector(m)[:, None]
    best = 0.0
    for n in range(N - m + 1):
        Qn, Qnm = fiber(J, n).basis, fiber(J, n + m).basis
        if Qn.shape[1] == 0 or Qnm.shape[1] == 0:
            continue
        block = Qnm.conj().T @ np.kron(vec, Qn)
        best = max(best, float(np.linalg.norm(block, 2)))
    return best


def quotient_norm_estimate(J: GradedIdeal, p, N: int) -> float:
    """Norm of ``p`` evaluated on the compressed shift of level ``N``.

    ``p`` is a :class:`FreePoly` or a mapping from words to equally sized
    coefficient matrices.  The value is a lower bound for the norm of ``p``
    as a multiplier on the variety of ``J`` and does not decrease with ``N``.
    """
    if isinstance(p, FreePoly):
        deg = p.degree or 0
    else:
        deg = max((len(w) for w in p), default=0)
    if N < deg:
        raise ValueError(f"N={N} is below deg p = {deg}")
    if isinstance(p, FreePoly) and p.is_homogeneous():
        return _homogeneous_block_norm(J, p, N)
    S = compressed_shift(J, max(N, 1))
    val = eval_poly(p, S) if isinstance(p, FreePoly) else eval_matrix_poly(p, S)
    return float(np.linalg.norm(val, 2))


def matrix_span_subspace(points: Sequence[MatrixTuple], d: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Smallest ``V ⊆ C^d`` with every point in ``V ⊗ M_n``.

    ``V`` is the common zero set of the functionals ``f`` with
    ``sum_i f_i X_i = 0`` for all points, which is the span of the entry
    vectors ``(X_1[a, b], ..., X_d[a, b])``.

    Returns
    -------
    ndarray
        ``d x dim V`` matrix with orthonormal columns.
    """
    points = list(points)
    if not points:
        if d is None:
            raise ValueError("d is required for an empty point list")
        return np.zeros((d, 0), dtype=complex)
    d = points[0].d if d is None else d
    n = points[0].n
    for k, X in enumerate(points):
        if X.d != d or X.n != n:
            raise ValueError(f"point {k} has (d, n) = ({X.d}, {X.n}), expected ({d}, {n})")
    entries = np.concatenate([X.matrices.reshape(d, -1) for X in points], axis=1)
    if not entries.any():
        return np.zeros((d, 0), dtype=complex)
    u, s, _ = np.linalg.svd(entries, full_matrices=False)
    return u[:, s > tol * s[0]]


def _kron_power(U: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [U] * n, np.eye(1, dtype=complex))


def unitary_equivalence_residual(U, J1: GradedIdeal, J2: GradedIdeal, N: int) -> float:
    """Largest sine of a principal angle between ``U^{⊗n} J1_n`` and ``J2_n`` over ``n <= N``.

    Returns ``inf`` when some dimension differs.
    """
    worst = 0.0
    for n in range(N + 1):
        B1, B2 = J1.basis(n), J2.basis(n)
        if B1.shape[1] != B2.shape[1]:
            return float("inf")
        if B1.shape[1] == 0:
            continue
        image = _kron_power(U, n) @ B1
        leak = image - B2 @ (B2.conj().T @ image)
        worst = max(worst, float(np.linalg.norm(leak, 2)))
    return worst


def verify_unitary_equivalence(U, J1: GradedIdeal, J2: GradedIdeal, N: int | None = None,
                               tol: float = 1e-8) -> bool:
    """Check that ``U^{⊗n}`` carries ``J1_n`` onto ``J2_n`` for every ``n <= N``."""
    U = np.asarray(U, dtype=complex)
    if J1.d != J2.d or U.shape != (J1.d, J1.d):
        raise ValueError("U must be d x d and both ideals must share d")
    if np.linalg.norm(U.conj().T @ U - np.eye(J1.d), 2) > 1e-10:
        raise ValueError("U is not unitary")
    need = max(J1.max_generator_degree, J2.max_generator_degree)
    N = need if N is None else N
    if N < need:
        raise ValueError(f"N={N} is below the largest generator degree {need}")
    return unitary_equivalence_residual(U, J1, J2, N) <= tol


def commutators(d: int) -> list[FreePoly]:
    z = [FreePoly.var(i, d) for i in range(d)]
    return [z[i] * z[j] - z[j] * z[i] for i in range(d) for j in range(i + 1, d)]


def commutatorize(J: GradedIdeal) -> GradedIdeal:
    """``J`` with every commutator ``z_i z_j - z_j z_i`` adjoined."""
    return GradedIdeal(J.d, list(J.generators) + commutators(J.d))


def commutator_ideal(d: int) -> GradedIdeal:
    return GradedIdeal(d, commutators(d))


def random_ideal(rng: np.random.Generator, d: int, max_degree: int = 3, max_generators: int = 3,
                 integer: bool = False) -> GradedIdeal:
    """Random homogeneous ideal with sparse generators of degree ``1..max_degree``."""
    gens = []
    for _ in range(int(rng.integers(0, max_generators + 1))):
        k = int(rng.integers(1, max_degree + 1))
        words = list(np.ndindex(*([d] * k)))
        picks = rng.choice(len(words), size=min(len(words), int(rng.integers(1, 4))), replace=False)
        if integer:
            coeffs = rng.integers(-2, 3, size=len(picks)).astype(complex)
        else:
            coeffs = rng.standard_normal(len(picks)) + 1j * rng.standard_normal(len(picks))
        gens.append(FreePoly(d, {words[i]: c for i, c in zip(picks, coeffs)}))
    return GradedIdeal(d, gens)


__all__ = [
    "GradedIdeal",
    "SubproductFiber",
    "Witness",
    "commutator_ideal",
    "commutatorize",
    "compressed_shift",
    "compression_norm",
    "fiber",
    "graded_basis",
    "matrix_span_subspace",
    "membership",
    "membership_residual",
    "nullstellensatz_witness",
    "projection",
    "quotient_norm_estimate",
    "random_ideal",
    "subproduct_residual",
    "unitary_equivalence_residual",
    "verify_unitary_equivalence",
]
