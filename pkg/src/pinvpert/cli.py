"""Command-line interface: ``pinvpert {analyze,sweep,generate}``.

Exit codes of ``analyze``: 0 all asserted rows hold, 1 some asserted row fails,
2 unstable or undecided instance, 3 formula breakdown or singular
``I + dT T^dag``, 4 I/O or parse error. Environment variables are not read.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConstructionError, InvalidInputError, ParseError, PinvPertError
from .harness.generators import KINDS, gen_instance, gen_surrogate
from .harness.matrix_io import read_matrix, write_matrix
from .harness.report import EXIT_BREAKDOWN, EXIT_IO, build_report, dumps_report
from .harness.sweep import DEFAULT_SCALES, rows_to_csv, run_sweep
from .perturb import DEFAULT_RANK_TOL, DEFAULT_STABILITY_MARGIN, make_instance


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_vector(path, name):
    A = read_matrix(path)
    if 1 not in A.shape:
        raise ParseError(f"{name} must be a single row or column, got shape {A.shape}", str(path))
    return A.reshape(-1)


def _add_common(p):
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL, help="relative singular value cutoff")
    p.add_argument("--stability-margin", type=float, default=DEFAULT_STABILITY_MARGIN,
                   help="guard band half-width for the intersection test")
    p.add_argument("--seed", type=int, default=0, help="base seed for every random draw")


def cmd_analyze(args):
    try:
        if args.surrogate is not None:
            inst = gen_surrogate(args.surrogate, args.eps, seed=args.seed, rank_tol=args.rank_tol,
                                 stability_margin=args.stability_margin)
        else:
            if args.T is None or args.dT is None:
                raise InvalidInputError("analyze needs --T and --dT, or --surrogate N")
            inst = make_instance(read_matrix(args.T), read_matrix(args.dT), args.rank_tol, args.stability_margin)
        b = _read_vector(args.b, "b") if args.b else None
        db = _read_vector(args.db, "db") if args.db else None
        if db is not None and b is None:
            raise InvalidInputError("--db needs --b")
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PinvPertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    report, code = build_report(
        inst,
        metric=args.metric,
        paranoid=args.paranoid,
        certificate=tuple(args.certificate) if args.certificate else None,
        samples=args.samples,
        seed=args.seed,
        b=b,
        db=db,
        include_matrices=not args.no_matrices,
        penrose=args.penrose,
    )
    try:
        _write_text(args.out, dumps_report(report))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if code == EXIT_BREAKDOWN:
        sigma = report["norms"].get("factor_sigma_min")
        if sigma is not None:
            print(f"I + dT T^dag is numerically singular: sigma_min = {sigma!r}", file=sys.stderr)
    return code


def cmd_sweep(args):
    rows = run_sweep(
        args.count,
        args.m,
        args.n,
        rank=args.rank,
        scales=args.scales,
        seed=args.seed,
        kind=args.kind,
        field=args.field,
        rank_tol=args.rank_tol,
        stability_margin=args.stability_margin,
        workers=args.workers,
    )
    try:
        _write_text(args.out, rows_to_csv(rows))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def cmd_generate(args):
    try:
        if args.surrogate is not None:
            inst = gen_surrogate(args.surrogate, args.eps, seed=args.seed)
        else:
            inst = gen_instance(args.m, args.n, args.rank, args.scale, kind=args.kind, seed=args.seed,
                                field=args.field, rank_tol=args.rank_tol, stability_margin=args.stability_margin)
    except (ConstructionError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_matrix(out / "T.json", np.asarray(inst.T))
        write_matrix(out / "dT.json", np.asarray(inst.dT))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pinvpert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one perturbation instance and write a JSON report")
    a.add_argument("--T", help="MatrixFile for T")
    a.add_argument("--dT", help="MatrixFile for the perturbation")
    a.add_argument("--b", help="MatrixFile (one row or column) right-hand side")
    a.add_argument("--db", help="MatrixFile (one row or column) right-hand side perturbation")
    a.add_argument("--surrogate", type=int, metavar="N", help="use the n*D difference surrogate instead of files")
    a.add_argument("--eps", type=float, default=1e-2, help="surrogate perturbation size (dT = eps*T)")
    a.add_argument("--certificate", type=float, nargs=2, metavar=("A", "B"),
                   help="check ||dT x|| <= A||x|| + B||Tx|| on sampled directions")
    a.add_argument("--samples", type=int, default=256, help="random directions for --certificate")
    a.add_argument("--metric", choices=("standard", "graph"), default="graph",
                   help="inner product on the domain for the closed form")
    a.add_argument("--paranoid", action="store_true", help="compare every adjoint convention against the oracle")
    a.add_argument("--penrose", action="store_true", help="also check the Penrose equations for the closed form")
    a.add_argument("--no-matrices", action="store_true", help="omit G and Tbar^dag from the report")
    a.add_argument("--out", default="-", help="report path (default stdout)")
    _add_common(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="bound tightness across seeds and scales, as CSV")
    s.add_argument("--count", type=int, default=10, help="instances (seeds) per scale")
    s.add_argument("--m", type=int, default=8, help="rows of T")
    s.add_argument("--n", type=int, default=6, help="columns of T")
    s.add_argument("--rank", type=int, default=-1, help="rank of T; negative draws it per seed")
    s.add_argument("--scales", type=float, nargs="+", default=list(DEFAULT_SCALES), help="perturbation scales")
    s.add_argument("--kind", choices=KINDS, default="stable", help="stability class of the generated instances")
    s.add_argument("--field", choices=("real", "complex"), default="real", help="scalar field")
    s.add_argument("--workers", type=int, default=1, help="worker processes (output does not depend on this)")
    s.add_argument("--out", default="-", help="CSV path (default stdout)")
    _add_common(s)
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("generate", help="write T.json and dT.json for a generated instance")
    g.add_argument("--m", type=int, default=8, help="rows of T")
    g.add_argument("--n", type=int, default=6, help="columns of T")
    g.add_argument("--rank", type=int, default=3, help="rank of T")
    g.add_argument("--scale", type=float, default=1e-3, help="perturbation scale")
    g.add_argument("--kind", choices=KINDS, default="stable", help="stability class of the instance")
    g.add_argument("--field", choices=("real", "complex"), default="real", help="scalar field")
    g.add_argument("--surrogate", type=int, metavar="N", help="write the n*D difference surrogate instead")
    g.add_argument("--eps", type=float, default=1e-2, help="surrogate perturbation size (dT = eps*T)")
    g.add_argument("--out-dir", default=".", help="directory for T.json and dT.json")
    _add_common(g)
    g.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
