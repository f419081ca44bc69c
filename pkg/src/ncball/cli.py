"""Command-line front end.

Every subcommand prints one JSON document on stdout.  Exit status is 0 for a
successful or affirmative answer, 1 for a negative answer (non-member,
infeasible, inequivalent, or no witness because the polynomial is a member)
and 2 for usage or data errors.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import fock, ideals, io, mobius, pick
from .freealg import eval_poly, row_norm

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _ideal_degree(args, J) -> int:
    return args.degree if args.degree is not None else J.max_generator_degree + 1


def cmd_eval(args, rec):
    p, X = io.load_poly(args.poly), io.load_tuple(args.tuple)
    if p.d != X.d:
        raise io.DataError(f"polynomial has d={p.d}, tuple has d={X.d}", "$.d")
    val = eval_poly(p, X)
    return EXIT_OK, {"d": X.d, "n": X.n, "value": io.matrix_to_json(val)}


def cmd_norm(args, rec):
    if args.tuple:
        X = io.load_tuple(args.tuple)
        r = row_norm(X)
        return EXIT_OK, {"d": X.d, "n": X.n, "row_norm": r, "in_ball": r < 1}
    if not args.poly:
        raise io.DataError("norm needs --tuple or --poly", "$")
    p = io.load_poly(args.poly)
    J = io.load_ideal(args.ideal) if args.ideal else ideals.GradedIdeal(p.d)
    if J.d != p.d:
        raise io.DataError(f"ideal has d={J.d}, polynomial has d={p.d}", "$.d")
    deg = p.degree or 0
    N = max(args.degree if args.degree is not None else deg, deg, 1)
    rng = np.random.default_rng(args.seed)
    samples = pick.variety_samples(J, max(deg, 1), args.samples, rng)
    out = {
        "degree": deg,
        "homogeneous": p.is_homogeneous(),
        "multiplier_norm": pick.homogeneous_multiplier_norm(J, p) if p.is_homogeneous() else None,
        "quotient_estimate": ideals.quotient_norm_estimate(J, p, N),
        "sup_lower_bound": pick.sup_norm_lower_bound(p, samples, J),
        "samples": args.samples,
        "seed": args.seed,
    }
    return EXIT_OK, out


def cmd_kernel(args, rec):
    Z, W = io.load_tuple(args.z), io.load_tuple(args.w)
    if args.p:
        P = io.matrix_from_json(io.load_json(args.p), "$", (Z.n, W.n))
    elif Z.n == W.n:
        P = np.eye(Z.n)
    else:
        raise io.DataError("--p is required when the node levels differ", "$")
    try:
        val = fock.szego_apply(Z, W, P)
    except ValueError as exc:
        raise io.DataError(str(exc), "$") from exc
    return EXIT_OK, {"n_z": Z.n, "n_w": W.n, "value": io.matrix_to_json(val)}


def cmd_ideal_basis(args, rec):
    J = io.load_ideal(args.ideal)
    N = _ideal_degree(args, J)
    rec.parameters["N"] = N
    dims = [J.dim(n) for n in range(N + 1)]
    out = {
        "d": J.d,
        "degree": N,
        "ideal_dims": dims,
        "fiber_dims": [J.d**n - k for n, k in enumerate(dims)],
    }
    if args.bases:
        out["bases"] = [io.matrix_to_json(J.basis(n)) if dims[n] else [] for n in range(N + 1)]
    return EXIT_OK, out


def _ideal_and_poly(args):
    J, p = io.load_ideal(args.ideal), io.load_poly(args.poly)
    if J.d != p.d:
        raise io.DataError(f"ideal has d={J.d}, polynomial has d={p.d}", "$.d")
    if not p.is_homogeneous():
        raise io.DataError("polynomial must be homogeneous", "$.terms")
    return J, p


def cmd_ideal_member(args, rec):
    J, p = _ideal_and_poly(args)
    member = ideals.membership(J, p)
    out = {
        "degree": p.degree or 0,
        "member": member,
        "residual": ideals.membership_residual(J, p),
        "compression_norm": ideals.compression_norm(J, p),
    }
    return (EXIT_OK if member else EXIT_NO), out


def cmd_witness(args, rec):
    J, p = _ideal_and_poly(args)
    if not 0 < args.t < 1:
        raise io.DataError(f"t must lie in (0, 1), got {args.t}", "--t")
    w = ideals.nullstellensatz_witness(J, p, args.t)
    out = {
        "member": w.member,
        "degree": w.degree,
        "residual": w.residual,
        "t": args.t,
        "row_norm": w.row_norm,
        "generator_residual": w.generator_residual,
        "value_norm": w.value_norm,
        "tuple": io.tuple_to_json(w.point) if w.point is not None else None,
        "certificate": io.vector_to_json(w.certificate) if w.certificate is not None else None,
    }
    return (EXIT_NO if w.member else EXIT_OK), out


def cmd_pick_check(args, rec):
    problem = io.problem_from_json(io.load_json(args.problem))
    res = pick.feasible(problem, args.tol)
    out = {"feasible": res.feasible, "margin": res.margin, "choi_dim": res.choi_dim}
    return (EXIT_OK if res.feasible else EXIT_NO), out


def cmd_mobius(args, rec):
    if bool(args.auto) == bool(args.point):
        raise io.DataError("give exactly one of --auto and --point", "$")
    if args.auto:
        phi = io.automorphism_from_json(io.load_json(args.auto))
    else:
        b = io.vector_from_json(io.load_json(args.point))
        try:
            phi = mobius.from_point(b)
        except ValueError as exc:
            raise io.DataError(str(exc), "$") from exc
    Z = io.load_tuple(args.tuple)
    if Z.d != phi.d:
        raise io.DataError(f"automorphism has d={phi.d}, tuple has d={Z.d}", "$.d")
    try:
        img = mobius.apply(phi, Z)
    except ValueError as exc:
        raise io.DataError(str(exc), "$") from exc
    return EXIT_OK, {"d": img.d, "n": img.n, "row_norm": row_norm(img), "tuple": io.tuple_to_json(img)}


def cmd_span(args, rec):
    points, d = io.points_from_json(io.load_json(args.points))
    try:
        V = ideals.matrix_span_subspace(points, d)
    except ValueError as exc:
        raise io.DataError(str(exc), "$.points") from exc
    return EXIT_OK, {"d": V.shape[0], "dim": V.shape[1], "basis": io.matrix_to_json(V.T) if V.shape[1] else []}


def cmd_equiv(args, rec):
    U = io.matrix_from_json(io.load_json(args.unitary))
    J1, J2 = io.load_ideal(args.ideal1), io.load_ideal(args.ideal2)
    need = max(J1.max_generator_degree, J2.max_generator_degree)
    N = args.degree if args.degree is not None else need
    rec.parameters["N"] = N
    try:
        ok = ideals.verify_unitary_equivalence(U, J1, J2, N)
        res = ideals.unitary_equivalence_residual(U, J1, J2, N)
    except ValueError as exc:
        raise io.DataError(str(exc), "$") from exc
    out = {"equivalent": ok, "degree": N, "residual": res if np.isfinite(res) else None}
    return (EXIT_OK if ok else EXIT_NO), out


COMMANDS = {
    "eval": (cmd_eval, "evaluate a free polynomial at a matrix tuple", ["poly", "tuple"]),
    "norm": (cmd_norm, "row norm of a tuple, or norm bounds of a polynomial", []),
    "kernel": (cmd_kernel, "apply the nc Szegő kernel K(Z, W) to P", ["z", "w"]),
    "ideal-basis": (cmd_ideal_basis, "graded dimensions of a homogeneous ideal", ["ideal"]),
    "ideal-member": (cmd_ideal_member, "membership of a homogeneous polynomial", ["ideal", "poly"]),
    "witness": (cmd_witness, "Nullstellensatz witness for a non-member", ["ideal", "poly"]),
    "pick-check": (cmd_pick_check, "Pick interpolation feasibility", ["problem"]),
    "mobius": (cmd_mobius, "apply a ball automorphism", ["tuple"]),
    "span": (cmd_span, "matrix span subspace of a point set", ["points"]),
    "equiv": (cmd_equiv, "verify a unitary equivalence of two ideals", ["unitary", "ideal1", "ideal2"]),
}

FILE_FLAGS = ["poly", "tuple", "ideal", "z", "w", "p", "problem", "auto", "point", "points",
              "unitary", "ideal1", "ideal2"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-N", "--degree", type=int, default=None,
                        help="truncation degree (default: deg p for norm, largest generator degree for equiv, one more for ideal-basis)")
    common.add_argument("--t", type=float, default=0.5, help="witness scaling in (0, 1)")
    common.add_argument("--tol", type=float, default=1e-9, help="PSD tolerance for pick-check")
    common.add_argument("--samples", type=int, default=100, help="Monte-Carlo samples for norm")
    common.add_argument("--seed", type=int, default=0, help="sampling seed")
    common.add_argument("--log", default=None, help="append a run record to this file")

    parser = argparse.ArgumentParser(prog="ncball", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text, required) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        for flag in FILE_FLAGS:
            if flag in required or _accepts(name, flag):
                sp.add_argument(f"--{flag}", required=flag in required)
        if name == "ideal-basis":
            sp.add_argument("--bases", action="store_true", help="include orthonormal bases")
    return parser


_OPTIONAL = {
    "norm": {"tuple", "poly", "ideal"},
    "kernel": {"p"},
    "mobius": {"auto", "point"},
}


def _accepts(command: str, flag: str) -> bool:
    return flag in _OPTIONAL.get(command, ())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_ERROR
    func = COMMANDS[args.command][0]
    rec = io.RunRecord(args.command, parameters={
        "N": args.degree, "t": args.t, "tol": args.tol, "samples": args.samples, "seed": args.seed,
    })
    start = time.perf_counter()
    try:
        for flag in FILE_FLAGS:
            path = getattr(args, flag, None)
            if path:
                rec.digests[flag] = io.file_digest(path) if _exists(path) else None
        code, out = func(args, rec)
    except io.DataError as exc:
        print(f"ncball {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"ncball {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(io.dumps(out) + "\n")
    sys.stdout.flush()
    if args.log:
        rec.outputs = {k: v for k, v in out.items() if not isinstance(v, (list, dict))}
        rec.wall_ms = (time.perf_counter() - start) * 1000
        with open(args.log, "a", encoding="utf-8") as fh:
            fh.write(rec.to_json() + "\n")
    return code


def _exists(path: str) -> bool:
    try:
        with open(path, "rb"):
            return True
    except OSError:
        return False


if __name__ == "__main__":
    sys.exit(main())
