"""
Truncated full Fock space, creation operators and the nc Szegő kernel.

The Fock space on ``d`` letters is identified with power series whose
monomials form an orthonormal basis.  Truncation keeps the words of length
``<= N``; the spaces of polynomials of bounded degree are co-invariant for the
creation tuple, so compressing to them loses nothing below degree ``N``.

Inner products are linear in the first argument and conjugate-linear in the
second throughout.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.sparse

from .freealg import FreePoly, MatrixTuple, row_norm, words_up_to, _check_d

MAX_DIM = 20000
DEFAULT_DEGREE = 10


def fock_dim(d: int, N: int) -> int:
    return sum(d**k for k in range(N + 1))


class TruncatedFock:
    """Words of length ``<= N`` in graded-lex order, as an orthonormal basis."""

    def __init__(self, d: int, N: int):
        d = _check_d(d)
        if N < 0:
            raise ValueError("truncation degree must be nonnegative")
        dim = fock_dim(d, N)
        if dim > MAX_DIM:
            raise ValueError(f"Fock truncation d={d}, N={N} has dimension {dim} > {MAX_DIM}")
        self.d = d
        self.N = N
        self.basis = tuple(words_up_to(d, N))
        self.index = {w: i for i, w in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def vector(self, p: FreePoly) -> np.ndarray:
        """Coordinates of ``p``; terms beyond degree ``N`` are dropped."""
        v = np.zeros(self.dim, dtype=complex)
        for w, c in p.terms.items():
            if len(w) <= self.N:
                v[self.index[w]] = c
        return v

    def poly(self, vec) -> FreePoly:
        return FreePoly(self.d, {w: c for w, c in zip(self.basis, vec) if c != 0})


def creation_operators(d: int, N: int) -> list:
    """Compressed left creation operators ``P_N L_i P_N`` as sparse matrices.

    ``L_i`` sends the word ``w`` to ``i w`` when ``len(w) < N`` and to zero
    otherwise, so each column has at most one nonzero entry.
    """
    space = TruncatedFock(d, N)
    ops = []
    for i in range(d):
        rows, cols = [], []
        for j, w in enumerate(space.basis):
            if len(w) < N:
                rows.append(space.index[(i,) + w])
                cols.append(j)
        data = np.ones(len(rows), dtype=complex)
        ops.append(scipy.sparse.csr_matrix((data, (rows, cols)), shape=(space.dim, space.dim)))
    return ops


def creation_tuple(d: int, N: int) -> MatrixTuple:
    """Dense version of :func:`creation_operators`."""
    return MatrixTuple([L.toarray() for L in creation_operators(d, N)])


def szego_system(Z: MatrixTuple, W: MatrixTuple) -> np.ndarray:
    """``I - sum_j conj(W_j) ⊗ Z_j``, acting on column-stacked ``vec(T)``."""
    if Z.d != W.d:
        raise ValueError(f"nodes have d={Z.d} and d={W.d}")
    A = np.eye(Z.n * W.n, dtype=complex)
    for Zj, Wj in zip(Z.matrices, W.matrices):
        A -= np.kron(Wj.conj(), Zj)
    return A


def _check_nodes(Z: MatrixTuple, W: MatrixTuple):
    for name, X in (("Z", Z), ("W", W)):
        r = row_norm(X)
        if r >= 1:
            raise ValueError(f"node {name} has row norm {r:.6g} >= 1; outside the open ball")


def szego_apply(Z: MatrixTuple, W: MatrixTuple, P) -> np.ndarray:
    """Szegő kernel ``K(Z, W)(P) = sum_k Z^k P W^{k*}`` over all words ``k``.

    Solved as the fixed point ``T = P + sum_j Z_j T W_j^*`` by one dense
    linear solve on ``vec(T)``.
    """
    _check_nodes(Z, W)
    P = np.asarray(P, dtype=complex)
    if P.shape != (Z.n, W.n):
        raise ValueError(f"P must have shape {(Z.n, W.n)}, got {P.shape}")
    A = szego_system(Z, W)
    t = scipy.linalg.solve(A, P.reshape(-1, order="F"))
    return t.reshape((Z.n, W.n), order="F")


def szego_map(Z: MatrixTuple) -> np.ndarray:
    """Matrix of the linear map ``P -> K(Z, Z)(P)`` in column-stacked coordinates."""
    _check_nodes(Z, Z)
    A = szego_system(Z, Z)
    return scipy.linalg.solve(A, np.eye(Z.n * Z.n, dtype=complex))


def kernel_coefficients(W: MatrixTuple, v, y, N: int = DEFAULT_DEGREE) -> FreePoly:
    """Degree-``N`` Taylor truncation of the kernel function ``K_{W,v,y}``.

    The coefficient of the word ``k`` is ``<y, W^k v> = v^* (W^k)^* y``, which
    is the reading under which ``<h, K_{W,v,y}> = <h(W) v, y>``.
    """
    v = np.asarray(v, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if v.shape != (W.n,) or y.shape != (W.n,):
        raise ValueError(f"v and y must have length {W.n}")
    space = TruncatedFock(W.d, N)
    # W^{i w} v = W_i (W^w v); the suffix w[1:] is shorter, so it is already cached
    images = {(): v}
    coeffs = {}
    for w in space.basis:
        if w:
            images[w] = W.matrices[w[0]] @ images[w[1:]]
        coeffs[w] = np.vdot(images[w], y)
    return FreePoly(W.d, coeffs)


def fock_inner(f: FreePoly, g: FreePoly) -> complex:
    """ℓ² pairing ``sum_k a_k(f) conj(a_k(g))``."""
    if f.d != g.d:
        raise ValueError(f"polynomials have d={f.d} and d={g.d}")
    return complex(sum(c * np.conj(g.coefficient(w)) for w, c in f.terms.items()))


def multiplier_adjoint(p: FreePoly, f: FreePoly, N: int) -> FreePoly:
    """``M_p^* f`` restricted to words of length ``<= N - deg p``.

    ``f`` is assumed known exactly through degree ``N``; the coefficient of
    ``u`` is ``sum_k conj(a_k(p)) f_{k u}``.
    """
    m = p.degree or 0
    out = {}
    for u in words_up_to(f.d, N - m):
        out[u] = sum(np.conj(a) * f.coefficient(k + u) for k, a in p.terms.items())
    return FreePoly(f.d, out)


def multiplier_adjoint_check(p: FreePoly, W: MatrixTuple, v, y, N: int = DEFAULT_DEGREE) -> float:
    """ℓ² residual of ``M_p^* K_{W,v,y} = K_{W,v,p(W)^* y}`` through degree ``N - deg p``."""
    m = p.degree or 0
    if m > N:
        raise ValueError(f"truncation degree {N} is below deg p = {m}")
    if row_norm(W) >= 1:
        raise ValueError("W must lie in the open ball")
    y = np.asarray(y, dtype=complex).ravel()
    lhs = multiplier_adjoint(p, kernel_coefficients(W, v, y, N), N)
    rhs = kernel_coefficients(W, v, p(W).conj().T @ y, N - m)
    return (lhs - rhs).norm()


__all__ = [
    "TruncatedFock",
    "creation_operators",
    "creation_tuple",
    "fock_dim",
    "fock_inner",
    "kernel_coefficients",
    "multiplier_adjoint",
    "multiplier_adjoint_check",
    "szego_apply",
    "szego_map",
    "szego_system",
]
