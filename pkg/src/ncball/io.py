"""
JSON formats shared by the library and the command line.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
rows.  :func:`dumps` prints floats with 17 significant digits and keeps key
order, so identical data always serialize to identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
import numbers
from dataclasses import asdict, dataclass, field

import numpy as np

from .freealg import FreePoly, MatrixTuple, MAX_D
from .ideals import GradedIdeal
from .mobius import BallAutomorphism
from .pick import PickProblem


class DataError(ValueError):
    """Malformed or invalid input document; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


# -- encoding -------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(x, ".17g")


def _encode(obj, out: list):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, numbers.Integral):
        out.append(str(int(obj)))
    elif isinstance(obj, numbers.Real):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _encode(val, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, val in enumerate(obj):
            if k:
                out.append(", ")
            _encode(val, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic single-line JSON."""
    out: list = []
    _encode(obj, out)
    return "".join(out)


def complex_to_json(c) -> list:
    c = complex(c)
    return [c.real, c.imag]


def vector_to_json(v) -> list:
    return [complex_to_json(c) for c in np.asarray(v).ravel()]


def matrix_to_json(M) -> list:
    M = np.atleast_2d(np.asarray(M))
    return [[complex_to_json(c) for c in row] for row in M]


def tuple_to_json(X: MatrixTuple) -> dict:
    return {"d": X.d, "n": X.n, "matrices": [matrix_to_json(A) for A in X.matrices]}


def poly_to_json(p: FreePoly) -> dict:
    return {
        "d": p.d,
        "terms": [{"word": list(w), "re": c.real, "im": c.imag} for w, c in p.terms.items()],
    }


def ideal_to_json(J: GradedIdeal) -> dict:
    return {"d": J.d, "generators": [poly_to_json(g) for g in J.generators]}


def automorphism_to_json(phi: BallAutomorphism) -> dict:
    return {"d": phi.d, "T": matrix_to_json(phi.T)}


def problem_to_json(problem: PickProblem) -> dict:
    return {
        "nodes": [tuple_to_json(Z) for Z in problem.nodes],
        "targets": [matrix_to_json(W) for W in problem.targets],
        "e": problem.e,
    }


# -- decoding -------------------------------------------------------------

def _require(doc, key, path):
    if not isinstance(doc, dict):
        raise DataError("expected an object", path)
    if key not in doc:
        raise DataError(f"missing field {key!r}", path)
    return doc[key]


def _int(x, path, lo=None, hi=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DataError("expected an integer", path)
    if (lo is not None and x < lo) or (hi is not None and x > hi):
        raise DataError(f"value {x} outside [{lo}, {hi}]", path)
    return x


def _num(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DataError("expected a number", path)
    return float(x)


def complex_from_json(x, path="$") -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise DataError("expected a [re, im] pair", path)
    return complex(_num(x[0], f"{path}[0]"), _num(x[1], f"{path}[1]"))


def vector_from_json(doc, path="$") -> np.ndarray:
    if not isinstance(doc, list):
        raise DataError("expected a list of [re, im] pairs", path)
    return np.array([complex_from_json(c, f"{path}[{i}]") for i, c in enumerate(doc)], dtype=complex)


def matrix_from_json(doc, path="$", shape=None) -> np.ndarray:
    if not isinstance(doc, list) or not doc:
        raise DataError("expected a nonempty list of rows", path)
    rows = []
    for i, row in enumerate(doc):
        if not isinstance(row, list):
            raise DataError("expected a row list", f"{path}[{i}]")
        rows.append([complex_from_json(c, f"{path}[{i}][{j}]") for j, c in enumerate(row)])
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width or width == 0:
            raise DataError("rows must be nonempty and of equal length", f"{path}[{i}]")
    M = np.array(rows, dtype=complex)
    if shape is not None and M.shape != shape:
        raise DataError(f"expected shape {shape}, got {M.shape}", path)
    return M


def tuple_from_json(doc, path="$") -> MatrixTuple:
    d = _int(_require(doc, "d", path), f"{path}.d", 1, MAX_D)
    n = _int(_require(doc, "n", path), f"{path}.n", 1)
    mats = _require(doc, "matrices", path)
    if not isinstance(mats, list) or len(mats) != d:
        raise DataError(f"expected {d} matrices", f"{path}.matrices")
    arrs = [matrix_from_json(m, f"{path}.matrices[{j}]", (n, n)) for j, m in enumerate(mats)]
    return MatrixTuple(arrs)


def poly_from_json(doc, path="$") -> FreePoly:
    d = _int(_require(doc, "d", path), f"{path}.d", 1, MAX_D)
    terms = _require(doc, "terms", path)
    if not isinstance(terms, list):
        raise DataError("expected a list", f"{path}.terms")
    coeffs: dict = {}
    for k, t in enumerate(terms):
        tp = f"{path}.terms[{k}]"
        word = _require(t, "word", tp)
        if not isinstance(word, list):
            raise DataError("expected a list of letters", f"{tp}.word")
        w = tuple(_int(a, f"{tp}.word[{i}]", 0, d - 1) for i, a in enumerate(word))
        c = complex(_num(_require(t, "re", tp), f"{tp}.re"), _num(t.get("im", 0.0), f"{tp}.im"))
        coeffs[w] = coeffs.get(w, 0) + c
    return FreePoly(d, coeffs)


def ideal_from_json(doc, path="$") -> GradedIdeal:
    d = _int(_require(doc, "d", path), f"{path}.d", 1, MAX_D)
    gens = _require(doc, "generators", path)
    if not isinstance(gens, list):
        raise DataError("expected a list", f"{path}.generators")
    polys = []
    for k, g in enumerate(gens):
        gp = f"{path}.generators[{k}]"
        p = poly_from_json(g, gp)
        if p.d != d:
            raise DataError(f"generator has d={p.d}, ideal has d={d}", f"{gp}.d")
        if not p.is_homogeneous():
            raise DataError(f"generator {k} is not homogeneous", gp)
        polys.append(p)
    return GradedIdeal(d, polys)


def automorphism_from_json(doc, path="$") -> BallAutomorphism:
    d = _int(_require(doc, "d", path), f"{path}.d", 1, MAX_D)
    T = matrix_from_json(_require(doc, "T", path), f"{path}.T", (d + 1, d + 1))
    phi = BallAutomorphism(T, "matrix")
    if phi.signature_defect() > 1e-9:
        raise DataError("T does not preserve the signature diag(1, -I)", f"{path}.T")
    return phi


def problem_from_json(doc, path="$") -> PickProblem:
    nodes = _require(doc, "nodes", path)
    targets = _require(doc, "targets", path)
    if not isinstance(nodes, list) or not isinstance(targets, list):
        raise DataError("nodes and targets must be lists", path)
    e = _int(doc.get("e", 1), f"{path}.e", 1, 4)
    Zs = [tuple_from_json(z, f"{path}.nodes[{k}]") for k, z in enumerate(nodes)]
    Ws = [matrix_from_json(w, f"{path}.targets[{k}]") for k, w in enumerate(targets)]
    try:
        return PickProblem(Zs, Ws, e)
    except ValueError as exc:
        raise DataError(str(exc), path) from exc


def points_from_json(doc, path="$") -> tuple[list[MatrixTuple], int | None]:
    """``{"d": int, "points": [MatrixTuple, ...]}`` or a bare list of tuples."""
    d = None
    if isinstance(doc, dict):
        if "d" in doc:
            d = _int(doc["d"], f"{path}.d", 1, MAX_D)
        doc = _require(doc, "points", path)
        path = f"{path}.points"
    if not isinstance(doc, list):
        raise DataError("expected a list of tuples", path)
    return [tuple_from_json(x, f"{path}[{k}]") for k, x in enumerate(doc)], d


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read file: {exc.strerror}", path) from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc.msg} at line {exc.lineno}", path) from exc


def load_tuple(path: str) -> MatrixTuple:
    return tuple_from_json(load_json(path))


def load_poly(path: str) -> FreePoly:
    return poly_from_json(load_json(path))


def load_ideal(path: str) -> GradedIdeal:
    return ideal_from_json(load_json(path))


def file_digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


@dataclass
class RunRecord:
    """One CLI invocation, as appended to the ``--log`` file."""

    command: str
    digests: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    def to_json(self) -> str:
        return dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        doc = json.loads(text)
        return cls(**{k: doc[k] for k in ("command", "digests", "parameters", "outputs", "wall_ms")})
