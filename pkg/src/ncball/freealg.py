"""
Free monoid, free polynomials and matrix tuples.

Words are plain tuples of letter indices.  Letters are ordered
``0 < 1 < ... < d-1`` and words are ordered graded-lexicographically, so the
degree-``n`` words enumerate exactly like the base-``d`` digits of
``0 .. d**n - 1``; :func:`word_index` uses that correspondence.
"""

from __future__ import annotations

import itertools
import logging
import numbers
import warnings
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

MAX_D = 8

Word = tuple


def _check_d(d) -> int:
    if isinstance(d, bool) or not isinstance(d, numbers.Integral):
        raise TypeError(f"d must be an integer, got {d!r}")
    d = int(d)
    if not 1 <= d <= MAX_D:
        raise ValueError(f"d must lie in [1, {MAX_D}], got {d}")
    return d


def word_key(w: Word):
    """Sort key for the graded-lexicographic order."""
    return (len(w), tuple(w))


def words_of_length(d: int, n: int) -> Iterator[Word]:
    """All words of length ``n`` in increasing order."""
    return itertools.product(range(d), repeat=n)


def words_up_to(d: int, n: int) -> list[Word]:
    """All words of length ``<= n`` in increasing order.

    There are ``sum(d**k for k in range(n + 1))`` of them.
    """
    out: list[Word] = []
    for k in range(n + 1):
        out.extend(words_of_length(d, k))
    return out


def word_index(w: Word, d: int) -> int:
    """Position of ``w`` among the words of the same length."""
    idx = 0
    for letter in w:
        idx = idx * d + letter
    return idx


def validate_word(w, d: int) -> Word:
    w = tuple(int(a) for a in w)
    for a in w:
        if not 0 <= a < d:
            raise ValueError(f"letter {a} out of range for d={d}")
    return w


class FreePoly:
    """A polynomial in ``d`` noncommuting variables with complex coefficients.

    Parameters
    ----------
    d : int
        Number of variables.
    terms : mapping, optional
        Word -> coefficient.  Zero coefficients are dropped.

    Examples
    --------
    >>> z1, z2 = FreePoly.var(0, 2), FreePoly.var(1, 2)
    >>> (z1 * z2 - z2 * z1).degree
    2
    """

    __slots__ = ("d", "_terms")

    def __init__(self, d: int, terms: Mapping | None = None):
        d = _check_d(d)
        clean = {}
        for w, c in (terms or {}).items():
            w = validate_word(w, d)
            c = complex(c)
            if c != 0:
                clean[w] = clean.get(w, 0) + c
                if clean[w] == 0:
                    del clean[w]
        self.d = d
        self._terms = MappingProxyType(dict(sorted(clean.items(), key=lambda kv: word_key(kv[0]))))

    # -- constructors ---------------------------------------------------
    @classmethod
    def var(cls, i: int, d: int) -> "FreePoly":
        return cls(d, {(i,): 1.0})

    @classmethod
    def const(cls, c, d: int) -> "FreePoly":
        return cls(d, {(): c})

    @classmethod
    def monomial(cls, w: Iterable[int], d: int, c=1.0) -> "FreePoly":
        return cls(d, {tuple(w): c})

    @classmethod
    def from_vector(cls, vec, n: int, d: int) -> "FreePoly":
        """Homogeneous polynomial from coordinates in the degree-``n`` word basis."""
        vec = np.asarray(vec)
        if vec.shape != (d**n,):
            raise ValueError(f"expected a vector of length {d**n}, got shape {vec.shape}")
        return cls(d, {w: c for w, c in zip(words_of_length(d, n), vec) if c != 0})

    # -- basic structure ------------------------------------------------
    @property
    def terms(self) -> Mapping:
        return self._terms

    @property
    def degree(self) -> int | None:
        """Maximal word length in the support; ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        return max(len(w) for w in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self._terms}) <= 1

    def homogeneous_component(self, n: int) -> "FreePoly":
        return FreePoly(self.d, {w: c for w, c in self._terms.items() if len(w) == n})

    def coefficient(self, w: Word) -> complex:
        return self._terms.get(tuple(w), 0j)

    def to_vector(self, n: int) -> np.ndarray:
        """Coordinates of the degree-``n`` component in the word basis."""
        vec = np.zeros(self.d**n, dtype=complex)
        for w, c in self._terms.items():
            if len(w) == n:
                vec[word_index(w, self.d)] = c
        return vec

    def norm(self) -> float:
        """ℓ² norm of the coefficient sequence."""
        return float(np.sqrt(sum(abs(c) ** 2 for c in self._terms.values())))

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "FreePoly":
        if isinstance(other, FreePoly):
            if other.d != self.d:
                raise ValueError(f"variable count mismatch: {self.d} vs {other.d}")
            return other
        if isinstance(other, numbers.Number):
            return FreePoly.const(other, self.d)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0) + c
        return FreePoly(self.d, terms)

    __radd__ = __add__

    def __neg__(self):
        return FreePoly(self.d, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return FreePoly(self.d, {w: c * other for w, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for u, a in self._terms.items():
            for v, b in other._terms.items():
                terms[u + v] = terms.get(u + v, 0) + a * b
        return FreePoly(self.d, terms)

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if not isinstance(other, numbers.Number):
            return NotImplemented
        return self * (1 / other)

    def __pow__(self, k: int):
        out = FreePoly.const(1, self.d)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FreePoly):
            return NotImplemented
        return self.d == other.d and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.d, tuple(self._terms.items())))

    def allclose(self, other: "FreePoly", atol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= atol for c in diff._terms.values())

    def __call__(self, X: "MatrixTuple") -> np.ndarray:
        return eval_poly(self, X)

    def __repr__(self):
        if not self._terms:
            return f"FreePoly(d={self.d}, 0)"
        parts = []
        for w, c in self._terms.items():
            mono = "".join(f"z{a + 1}" for a in w) or "1"
            parts.append(f"({c:g})*{mono}")
        return f"FreePoly(d={self.d}, " + " + ".join(parts) + ")"


class MatrixTuple:
    """A point ``X = (X_1, ..., X_d)`` of ``M_n^d``.

    The matrices are stored as a read-only complex array of shape ``(d, n, n)``.
    """

    __slots__ = ("matrices",)

    def __init__(self, matrices):
        arr = np.array(matrices, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[1] == 0:
            raise ValueError(f"expected d square matrices of equal size, got shape {arr.shape}")
        _check_d(arr.shape[0])
        arr.setflags(write=False)
        self.matrices = arr

    @classmethod
    def zeros(cls, d: int, n: int) -> "MatrixTuple":
        return cls(np.zeros((d, n, n)))

    @classmethod
    def scalar(cls, z, n: int = 1) -> "MatrixTuple":
        """Tuple ``(z_1 I_n, ..., z_d I_n)``."""
        z = np.asarray(z, dtype=complex).ravel()
        return cls(z[:, None, None] * np.eye(n)[None])

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __getitem__(self, i) -> np.ndarray:
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def __len__(self):
        return self.d

    def __mul__(self, t):
        if not isinstance(t, numbers.Number):
            return NotImplemented
        return MatrixTuple(self.matrices * t)

    __rmul__ = __mul__

    def row(self) -> np.ndarray:
        """The ``n x dn`` block row ``(X_1 ... X_d)``."""
        return np.concatenate(list(self.matrices), axis=1)

    @classmethod
    def from_row(cls, row: np.ndarray, d: int) -> "MatrixTuple":
        n = row.shape[0]
        return cls([row[:, j * n:(j + 1) * n] for j in range(d)])

    def allclose(self, other: "MatrixTuple", atol: float = 1e-12) -> bool:
        return self.matrices.shape == other.matrices.shape and np.allclose(
            self.matrices, other.matrices, rtol=0, atol=atol
        )

    def __repr__(self):
        return f"MatrixTuple(d={self.d}, n={self.n})"


def eval_poly(p: FreePoly, X: MatrixTuple) -> np.ndarray:
    """Evaluate ``p`` at the matrix tuple ``X``.

    Word products are built from memoized prefix products, so each distinct
    prefix is multiplied once per call.
    """
    if p.d != X.d:
        raise ValueError(f"polynomial has d={p.d} but tuple has d={X.d}")
    return _eval_terms(p.terms.items(), X, lambda c, M: c * M, (X.n, X.n))


def eval_matrix_poly(coeffs: Mapping, X: MatrixTuple) -> np.ndarray:
    """Evaluate ``sum_k X^k ⊗ A_k`` for matrix coefficients ``A_k``."""
    items = [(validate_word(w, X.d), np.asarray(A, dtype=complex)) for w, A in coeffs.items()]
    if not items:
        raise ValueError("empty coefficient map; the coefficient size is undetermined")
    e = items[0][1].shape
    if any(A.shape != e for _, A in items):
        raise ValueError("matrix coefficients must share one shape")
    return _eval_terms(items, X, lambda A, M: np.kron(M, A), (X.n * e[0], X.n * e[1]))


def _eval_terms(items, X: MatrixTuple, combine, shape) -> np.ndarray:
    cache: dict = {(): np.eye(X.n, dtype=complex)}

    def product(w):
        if w not in cache:
            cache[w] = product(w[:-1]) @ X.matrices[w[-1]]
        return cache[w]

    out = np.zeros(shape, dtype=complex)
    for w, c in items:
        out += combine(c, product(w))
    return out


def word_power(X: MatrixTuple, w: Word) -> np.ndarray:
    """``X^w = X_{w_1} X_{w_2} ... X_{w_k}``."""
    out = np.eye(X.n, dtype=complex)
    for a in w:
        out = out @ X.matrices[a]
    return out


def row_norm(X: MatrixTuple) -> float:
    """Operator norm of the block row, ``||sum_j X_j X_j^*||^(1/2)``."""
    gram = np.einsum("jab,jcb->ac", X.matrices, X.matrices.conj())
    top = scipy.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(top, 0.0)))


def in_ball(X: MatrixTuple) -> bool:
    return row_norm(X) < 1


def direct_sum(X: MatrixTuple, Y: MatrixTuple) -> MatrixTuple:
    if X.d != Y.d:
        raise ValueError(f"cannot sum tuples with d={X.d} and d={Y.d}")
    return MatrixTuple([scipy.linalg.block_diag(a, b) for a, b in zip(X.matrices, Y.matrices)])


def direct_sum_all(tuples: Iterable[MatrixTuple]) -> MatrixTuple:
    tuples = list(tuples)
    if not tuples:
        raise ValueError("need at least one tuple")
    d = tuples[0].d
    if any(t.d != d for t in tuples):
        raise ValueError("all tuples must share d")
    return MatrixTuple([scipy.linalg.block_diag(*(t.matrices[j] for t in tuples)) for j in range(d)])


def conjugate(X: MatrixTuple, S) -> MatrixTuple:
    """Similarity ``(S^-1 X_1 S, ..., S^-1 X_d S)``.

    Raises
    ------
    ValueError
        If ``S`` has the wrong shape or an LU pivot below ``1e-12 * ||S||``.
    """
    S = np.asarray(S, dtype=complex)
    if S.shape != (X.n, X.n):
        raise ValueError(f"similarity must be {X.n}x{X.n}, got {S.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(S)
    if np.min(np.abs(np.diag(lu))) < 1e-12 * np.linalg.norm(S, 2):
        raise ValueError("similarity matrix is singular")
    logger.debug("conjugate: cond(S) = %.3e", np.linalg.cond(S))
    return MatrixTuple([scipy.linalg.lu_solve((lu, piv), A @ S) for A in X.matrices])


def homogeneous_component(p: FreePoly, n: int) -> FreePoly:
    return p.homogeneous_component(n)


def random_tuple(rng: np.random.Generator, d: int, n: int, radius: float | None = None) -> MatrixTuple:
    """Gaussian complex tuple, optionally rescaled to the given row norm."""
    X = MatrixTuple(rng.standard_normal((d, n, n)) + 1j * rng.standard_normal((d, n, n)))
    if radius is not None:
        X = X * (radius / row_norm(X))
    return X


def random_poly(rng: np.random.Generator, d: int, degree: int, homogeneous: bool = False,
                density: float = 1.0) -> FreePoly:
    """Random complex polynomial with Gaussian coefficients."""
    degrees = [degree] if homogeneous else range(degree + 1)
    terms = {}
    for k in degrees:
        for w in words_of_length(d, k):
            if density >= 1 or rng.random() < density:
                terms[w] = complex(rng.standard_normal(), rng.standard_normal())
    if homogeneous and not terms:
        w = tuple(rng.integers(0, d, size=degree))
        terms[w] = 1.0
    return FreePoly(d, terms)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))
