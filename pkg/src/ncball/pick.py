"""
Matrix Nevanlinna–Pick feasibility on the nc ball and homogeneous multiplier norms.

A finite interpolation problem ``Z_i -> W_i`` is reduced to one node
``Z = ⊕ Z_i`` with target ``W = ⊕ W_i``.  The data extend to a contractive
multiplier iff the de Branges–Rovnyak map

    Φ(P) = K(Z, Z)(P) ⊗ I_e - W [K(Z, Z)(P) ⊗ I_e] W^*

is completely positive, which is read off its Choi matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .fock import szego_map
from .freealg import FreePoly, MatrixTuple, conjugate, direct_sum_all, eval_poly, random_unitary, row_norm
from .ideals import GradedIdeal, compressed_shift, projection, _homogeneous_degree

DEFAULT_TOL = 1e-9
MAX_E = 4


@dataclass(frozen=True)
class PickProblem:
    """Interpolation data: nodes ``Z_i`` at level ``n_i`` and ``(n_i e) x (n_i e)`` targets."""

    nodes: tuple
    targets: tuple = field(repr=False)
    e: int = 1

    def __init__(self, nodes: Sequence[MatrixTuple], targets: Sequence, e: int = 1):
        nodes = tuple(nodes)
        targets = tuple(np.asarray(W, dtype=complex) for W in targets)
        if not nodes:
            raise ValueError("need at least one node")
        if len(nodes) != len(targets):
            raise ValueError(f"{len(nodes)} nodes but {len(targets)} targets")
        if not 1 <= e <= MAX_E:
            raise ValueError(f"coefficient dimension e must lie in [1, {MAX_E}]")
        d = nodes[0].d
        for k, (Z, W) in enumerate(zip(nodes, targets)):
            if Z.d != d:
                raise ValueError(f"node {k} has d={Z.d}, expected {d}")
            r = row_norm(Z)
            if r >= 1:
                raise ValueError(f"node {k} has row norm {r:.6g} >= 1")
            if W.shape != (Z.n * e, Z.n * e):
                raise ValueError(f"target {k} must be {Z.n * e}x{Z.n * e}, got {W.shape}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "e", e)

    @property
    def d(self) -> int:
        return self.nodes[0].d

    @property
    def node(self) -> MatrixTuple:
        return direct_sum_all(self.nodes)

    @property
    def target(self) -> np.ndarray:
        # W_i is an n_i x n_i array of e x e blocks, so the direct sum stays block-compatible
        return scipy.linalg.block_diag(*self.targets)

    def reduced(self) -> "PickProblem":
        return PickProblem([self.node], [self.target], self.e)

    def scaled(self, s: float) -> "PickProblem":
        return PickProblem(self.nodes, [s * W for W in self.targets], self.e)

    @classmethod
    def from_poly(cls, p: FreePoly, nodes: Sequence[MatrixTuple], scale: float = 1.0) -> "PickProblem":
        return cls(nodes, [scale * eval_poly(p, Z) for Z in nodes])


def dbr_choi(problem: PickProblem) -> np.ndarray:
    """Choi matrix ``sum_{a,b} E_ab ⊗ Φ(E_ab)`` of the de Branges–Rovnyak map."""
    Z, W, e = problem.node, problem.target, problem.e
    n = Z.n
    ne = n * e
    # Kt[i, j, a, b] = K(E_ab)[i, j] with column-stacked vec on both sides
    Kt = szego_map(Z).reshape((n, n, n, n), order="F")
    G = np.einsum("ijab,kl->abikjl", Kt, np.eye(e)).reshape(n, n, ne, ne)
    blocks = G - W @ G @ W.conj().T
    return blocks.transpose(0, 2, 1, 3).reshape(n * ne, n * ne)


@dataclass(frozen=True)
class PickResult:
    feasible: bool
    margin: float
    choi_dim: int
    eigenvalues: np.ndarray = field(repr=False)
    hermitian_defect: float = 0.0


def feasible(problem: PickProblem, tol: float = DEFAULT_TOL) -> PickResult:
    """Decide whether the data extend to a multiplier of norm at most one.

    The answer is positive iff the smallest Choi eigenvalue is at least
    ``-tol * (1 + ||C||)``; ``margin`` is that eigenvalue.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    C = dbr_choi(problem)
    defect = float(np.linalg.norm(C - C.conj().T))
    evals = scipy.linalg.eigvalsh((C + C.conj().T) / 2)
    scale = float(np.max(np.abs(evals))) if evals.size else 0.0
    margin = float(evals[0])
    return PickResult(margin >= -tol * (1 + scale), margin, C.shape[0], evals, defect)


def classical_pick_matrix(z, w) -> np.ndarray:
    """Pick matrix ``[(1 - w_i conj(w_j)) / (1 - z_i conj(z_j))]`` for scalar disc data."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return (1 - np.outer(w, w.conj())) / (1 - np.outer(z, z.conj()))


def homogeneous_multiplier_norm(J: GradedIdeal, p: FreePoly) -> float:
    """Multiplier norm of homogeneous ``p`` on the variety of ``J``.

    Equals the ℓ² norm of the component of ``p`` orthogonal to ``J_m``.
    """
    _homogeneous_degree(p)
    return float(np.linalg.norm(projection(J, p)[1]))


def sup_norm_lower_bound(p: FreePoly, samples: Sequence[MatrixTuple], ideal: GradedIdeal | None = None,
                         variety_tol: float = 1e-8) -> float:
    """``max ||p(X)||`` over sample points strictly inside the ball.

    With ``ideal`` given, each sample must also annihilate the generators.
    """
    best = 0.0
    for k, X in enumerate(samples):
        r = row_norm(X)
        if r >= 1:
            raise ValueError(f"sample {k} has row norm {r:.6g} >= 1")
        if ideal is not None:
            for g in ideal.generators:
                if np.linalg.norm(eval_poly(g, X), 2) > variety_tol:
                    raise ValueError(f"sample {k} is not on the variety")
        best = max(best, float(np.linalg.norm(eval_poly(p, X), 2)))
    return best


def variety_samples(J: GradedIdeal, N: int, count: int, rng: np.random.Generator,
                    radius: float = 0.99) -> list[MatrixTuple]:
    """Points ``r U^* S U`` of the variety of ``J`` from its compressed shift at level ``N``."""
    S = compressed_shift(J, max(N, 1))
    out = []
    for _ in range(count):
        r = radius * rng.random() ** 0.25
        out.append(conjugate(S * r, random_unitary(rng, S.n)))
    return out


__all__ = [
    "PickProblem",
    "PickResult",
    "classical_pick_matrix",
    "dbr_choi",
    "feasible",
    "homogeneous_multiplier_norm",
    "sup_norm_lower_bound",
    "variety_samples",
]
