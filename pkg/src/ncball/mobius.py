"""
Automorphisms of the nc unit ball.

An automorphism is stored as a matrix ``T = [[a, v], [w, X]]`` in
``SU(1, d)`` (signature ``diag(1, -I_d)``), with ``v`` a row and ``w`` a
column.  At level ``n`` it acts on the block row ``Z = (Z_1 ... Z_d)`` by

    phi(Z) = (a Z + v ⊗ I_n) (w ⊗ I_n Z + X ⊗ I_n)^{-1},

so composition of maps is the matrix product and ``T`` is determined up to
the scalar ``(d+1)``-th roots of unity.  ``T`` is normalized to determinant
one with the principal root.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .freealg import FreePoly, MatrixTuple, eval_poly, random_tuple, random_unitary, row_norm, _check_d


def signature(d: int) -> np.ndarray:
    return np.diag([1.0] + [-1.0] * d).astype(complex)


def _normalize(T: np.ndarray) -> np.ndarray:
    det = np.linalg.det(T)
    return T / det ** (1.0 / T.shape[0])


@dataclass(frozen=True)
class BallAutomorphism:
    T: np.ndarray = field(repr=False)
    provenance: str = "matrix"

    def __post_init__(self):
        T = np.array(self.T, dtype=complex)
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] < 2:
            raise ValueError(f"T must be a square (d+1)x(d+1) matrix, got shape {T.shape}")
        _check_d(T.shape[0] - 1)
        T = _normalize(T)
        T.setflags(write=False)
        object.__setattr__(self, "T", T)

    @property
    def d(self) -> int:
        return self.T.shape[0] - 1

    @property
    def blocks(self):
        """``(a, v, w, X)`` with ``v`` of shape ``(1, d)`` and ``w`` of shape ``(d, 1)``."""
        T = self.T
        return T[0, 0], T[:1, 1:], T[1:, :1], T[1:, 1:]

    def signature_defect(self) -> float:
        J = signature(self.d)
        return float(np.linalg.norm(self.T.conj().T @ J @ self.T - J, 2))

    def __call__(self, Z: MatrixTuple) -> MatrixTuple:
        return apply(self, Z)


def identity(d: int) -> BallAutomorphism:
    return BallAutomorphism(np.eye(d + 1), "identity")


def from_unitary(U) -> BallAutomorphism:
    """The linear map ``z -> U z``, levelwise ``Z_i -> sum_j U[i, j] Z_j``."""
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    if U.shape != (d, d) or np.linalg.norm(U.conj().T @ U - np.eye(d), 2) > 1e-10:
        raise ValueError("U must be a square unitary matrix")
    T = np.eye(d + 1, dtype=complex)
    # Z (X ⊗ I)^{-1} with X = conj(U) multiplies the block row by U^T
    T[1:, 1:] = U.conj()
    return BallAutomorphism(T, "unitary")


def from_point(b) -> BallAutomorphism:
    """The involution exchanging ``0`` and the scalar point ``b``.

    For ``d = 1`` this is ``z -> (b - z) / (1 - conj(b) z)``.  It is the hyperbolic
    boost carrying ``0`` to ``b`` composed with ``z -> -z``.
    """
    b = np.asarray(b, dtype=complex).ravel()
    d = _check_d(b.size)
    nb = float(np.linalg.norm(b))
    if nb >= 1:
        raise ValueError(f"point must lie in the open ball, |b| = {nb:.6g}")
    gamma = 1.0 / np.sqrt(1.0 - nb**2)
    row = b[None, :]
    if nb > 0:
        X = np.eye(d) + (gamma - 1.0) * (row.conj().T @ row) / nb**2
    else:
        X = np.eye(d, dtype=complex)
    boost = np.block([[np.array([[gamma]]), gamma * row], [gamma * row.conj().T, X]])
    return BallAutomorphism(boost @ signature(d), "from_point")


def compose(phi: BallAutomorphism, psi: BallAutomorphism) -> BallAutomorphism:
    """``phi ∘ psi``."""
    if phi.d != psi.d:
        raise ValueError(f"automorphisms act on d={phi.d} and d={psi.d}")
    return BallAutomorphism(phi.T @ psi.T, "composition")


def invert(phi: BallAutomorphism) -> BallAutomorphism:
    J = signature(phi.d)
    # T^* J T = J gives T^{-1} = J T^* J
    return BallAutomorphism(J @ phi.T.conj().T @ J, "inverse")


def apply(phi: BallAutomorphism, Z: MatrixTuple) -> MatrixTuple:
    """Levelwise action ``(A Z + B)(C Z + D)^{-1}``.

    Raises
    ------
    ValueError
        If ``Z`` is outside the open ball or the resolvent block is singular.
    """
    if Z.d != phi.d:
        raise ValueError(f"automorphism has d={phi.d}, tuple has d={Z.d}")
    r = row_norm(Z)
    if r >= 1:
        raise ValueError(f"tuple has row norm {r:.6g} >= 1")
    a, v, w, X = phi.blocks
    n = Z.n
    eye = np.eye(n)
    row = Z.row()
    num = a * row + np.kron(v, eye)
    den = np.kron(w, eye) @ row + np.kron(X, eye)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(den)
    if np.min(np.abs(np.diag(lu))) < 1e-13 * np.linalg.norm(den, 2):
        raise ValueError("resolvent block is singular; tuple is outside the domain")
    # num @ den^{-1} = (den^{-T} num^T)^T
    out = scipy.linalg.lu_solve((lu, piv), num.T, trans=1).T
    return MatrixTuple.from_row(out, Z.d)


def derivative_at_zero(phi: BallAutomorphism, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian at the origin of level one, ``D[i, j] = d phi_i / d z_j``."""
    d = phi.d
    D = np.zeros((d, d), dtype=complex)
    for j in range(d):
        step = np.zeros(d)
        step[j] = h
        plus = apply(phi, MatrixTuple.scalar(step)).matrices[:, 0, 0]
        minus = apply(phi, MatrixTuple.scalar(-step)).matrices[:, 0, 0]
        D[:, j] = (plus - minus) / (2 * h)
    return D


def cartan_check(phi: BallAutomorphism, n: int = 2, trials: int = 10,
                 rng: np.random.Generator | None = None, tol: float = 1e-9) -> bool:
    """Whether ``phi`` fixes the origin with identity derivative.

    When it does, ``phi(Z) = Z`` is additionally checked on ``trials`` random
    level-``n`` points and the check fails if any point moves by more than ``tol``.
    """
    d = phi.d
    origin = apply(phi, MatrixTuple.zeros(d, 1)).matrices[:, 0, 0]
    if np.max(np.abs(origin)) > tol:
        return False
    if np.max(np.abs(derivative_at_zero(phi) - np.eye(d))) > 1e-6:
        return False
    rng = np.random.default_rng(0) if rng is None else rng
    for _ in range(trials):
        Z = random_tuple(rng, d, n, radius=0.9 * rng.random())
        if not apply(phi, Z).allclose(Z, atol=tol):
            return False
    return True


def circle_average(f, Z: MatrixTuple, n: int, M: int = 64) -> np.ndarray:
    """``(1/M) sum_j f(ω^j Z) ω^{-jn}`` with ``ω = exp(2πi/M)``.

    ``f`` is a :class:`FreePoly` or any callable from tuples to matrices.  For a
    polynomial of degree below ``M`` the result is exactly the degree-``n``
    homogeneous component evaluated at ``Z``.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    func: Callable = (lambda X: eval_poly(f, X)) if isinstance(f, FreePoly) else f
    acc = None
    for j in range(M):
        omega = np.exp(2j * np.pi * j / M)
        val = np.asarray(func(Z * omega), dtype=complex) * np.exp(-2j * np.pi * j * n / M)
        acc = val if acc is None else acc + val
    return acc / M


def random_automorphism(rng: np.random.Generator, d: int, radius: float = 0.9) -> BallAutomorphism:
    """``from_point(b) ∘ from_unitary(U)`` with ``|b|`` uniform in ``[0, radius)``."""
    b = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    b *= radius * rng.random() / np.linalg.norm(b)
    return compose(from_point(b), from_unitary(random_unitary(rng, d)))


__all__ = [
    "BallAutomorphism",
    "apply",
    "cartan_check",
    "circle_average",
    "compose",
    "derivative_at_zero",
    "from_point",
    "from_unitary",
    "identity",
    "invert",
    "random_automorphism",
    "signature",
]
