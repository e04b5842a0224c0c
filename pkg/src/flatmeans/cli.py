"""Command-line entry point.

Exit status: 0 on success, 1 for usage errors, 2 for invalid data or files.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import codec, formats, voronoi
from .errors import FlatMeansError
from .lloyd import ClusteringConfig, run
from .model import WeightVector, validate_weights
from .pca import EIGEN_METHODS

log = logging.getLogger("flatmeans")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class DataError(Exception):
    pass


def _weights(text, n, flag="--weights"):
    if text is None:
        return WeightVector.subspace(n)
    try:
        raw = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma separated list of numbers, got {text!r}") from None
    try:
        w = validate_weights(raw)
    except FlatMeansError as exc:
        raise DataError(f"{flag}: {exc}") from None
    if len(w) != n + 1:
        raise DataError(f"{flag}: {len(w)} weights given, flat dimension {n} needs {n + 1}")
    return w


def _floats(text, count, flag):
    try:
        values = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected {count} comma separated numbers, got {text!r}") from None
    if len(values) != count:
        raise UsageError(f"{flag}: expected {count} comma separated numbers, got {text!r}")
    return values


def _size(text):
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--size: expected WxH, got {text!r}") from None
    return w, h


def _add_clustering_flags(p, allow_file=True):
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--relative-epsilon", action="store_true",
                   help="treat --epsilon as a fraction of the current energy")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", default="random",
                   help="random, kmeans++" + (" or file:ASSIGN.csv" if allow_file else ""))
    p.add_argument("--eigen", choices=EIGEN_METHODS, default="auto")
    p.add_argument("--workers", type=int, default=1)


def _clustering_options(args, allow_file=True):
    init = args.init
    opts = dict(
        epsilon=args.epsilon,
        relative_epsilon=args.relative_epsilon,
        max_iters=args.max_iters,
        restarts=args.restarts,
        seed=args.seed,
        eigen_method=args.eigen,
        workers=args.workers,
    )
    if init == "random":
        opts["init"] = "random-points"
    elif init == "kmeans++":
        opts["init"] = "kmeans++"
    elif allow_file and init.startswith("file:"):
        opts["init"] = "given-partition"
        opts["initial_assignments"] = formats.read_assignments(init[5:])
    else:
        raise UsageError(f"--init: unknown initialization {init!r}")
    return opts


def _build_parser():
    parser = _Parser(prog="flatmeans", description="(omega, k)-means clustering with flats")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("cluster", help="cluster points from a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--weights")
    _add_clustering_flags(p)
    p.add_argument("--model", required=True)
    p.add_argument("--assignments")
    p.add_argument("--trace")

    p = sub.add_parser("voronoi", help="rasterize generalized Voronoi regions")
    p.add_argument("--flats", required=True)
    p.add_argument("--weights")
    p.add_argument("--bounds", required=True, help="xmin,ymin,xmax,ymax")
    p.add_argument("--size", required=True, help="WxH")
    p.add_argument("--labels", required=True)
    p.add_argument("--boundary")
    p.add_argument("--slice", dest="plane", help="origin;axis1;axis2, each comma separated")

    p = sub.add_parser("compress", help="compress a P6 image")
    p.add_argument("--image", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--weights")
    _add_clustering_flags(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("decompress", help="decompress a .wkc file to P6")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)

    p = sub.add_parser("imgerror", help="Euclidean pixel error between two P6 images")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = sub.add_parser("errortable", help="reconstruction error grid over k and n")
    p.add_argument("--image", required=True)
    p.add_argument("--kmax", type=int, default=5)
    p.add_argument("--nmax", type=int, default=5)
    _add_clustering_flags(p, allow_file=False)
    p.add_argument("--csv", help="also write k,n,error rows to this file")
    return parser


def _cmd_cluster(args):
    data = formats.read_points_csv(args.input)
    w = _weights(args.weights, args.dim)
    cfg = ClusteringConfig(k=args.k, n=args.dim, weights=w, **_clustering_options(args))
    clustering, trace = run(data, cfg)
    formats.write_model(args.model, clustering)
    if args.assignments:
        formats.write_assignments(args.assignments, clustering.assignments)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"best_restart {trace.best_restart}\n")
            fh.write("restart iteration energy repaired\n")
            for r, (energies, repairs) in enumerate(zip(trace.energies, trace.repairs)):
                for it, e in enumerate(energies):
                    fh.write(f"{r} {it} {e:.17g} {int(it in repairs)}\n")
    print(f"energy {clustering.energy:.17g}")
    print(f"iterations {clustering.iterations_run} converged {int(clustering.converged)}")
    print(f"cluster sizes {' '.join(str(c) for c in np.bincount(clustering.assignments, minlength=cfg.k))}")


def _parse_slice(text):
    parts = text.split(";")
    if len(parts) != 3:
        raise UsageError(f"--slice: expected origin;axis1;axis2, got {text!r}")
    vectors = []
    for part in parts:
        try:
            vectors.append([float(t) for t in part.split(",")])
        except ValueError:
            raise UsageError(f"--slice: cannot parse {part!r}") from None
    try:
        return voronoi.Slice(*vectors)
    except FlatMeansError as exc:
        raise DataError(f"--slice: {exc}") from None


def _cmd_voronoi(args):
    flats, N, n = formats.read_flats(args.flats)
    w = _weights(args.weights, n)
    bounds = _floats(args.bounds, 4, "--bounds")
    try:
        grid = voronoi.GridSpec(tuple(bounds), _size(args.size))
    except FlatMeansError as exc:
        raise DataError(f"--bounds/--size: {exc}") from None
    plane = _parse_slice(args.plane) if args.plane else None
    labels = voronoi.rasterize(flats, w, grid, plane)
    formats.write_pgm(args.labels, voronoi.labels_to_gray(labels, len(flats)))
    if args.boundary:
        formats.write_pgm(args.boundary, voronoi.boundary_to_gray(voronoi.extract_boundary(labels)))
    counts = np.bincount(labels.ravel(), minlength=len(flats))
    print("pixels per region " + " ".join(str(c) for c in counts))


def _cmd_compress(args):
    pixels = formats.read_ppm(args.image)
    w = _weights(args.weights, args.dim)
    c = codec.compress(pixels, args.k, args.dim, weights=w, **_clustering_options(args))
    formats.write_wkc(args.output, c)
    err = codec.image_error(pixels, codec.decompress(c))
    print(f"blocks {c.block_count} k {c.k} n {c.n} error {err:.6g}")


def _cmd_decompress(args):
    c = formats.read_wkc(args.input)
    formats.write_ppm(args.output, codec.decompress(c))


def _cmd_imgerror(args):
    a = formats.read_ppm(args.a)
    b = formats.read_ppm(args.b)
    print(f"{codec.image_error(a, b):.6g}")


def _cmd_errortable(args):
    if args.kmax < 1 or args.nmax < 0:
        raise UsageError("--kmax must be >= 1 and --nmax >= 0")
    pixels = formats.read_ppm(args.image)
    table = codec.error_table(
        pixels, range(1, args.kmax + 1), range(0, args.nmax + 1), **_clustering_options(args, False)
    )
    print(table.format())
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("k,n,error\n")
            for k, n, e in table.rows():
                fh.write(f"{k},{n},{e:.17g}\n")


COMMANDS = {
    "cluster": _cmd_cluster,
    "voronoi": _cmd_voronoi,
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "imgerror": _cmd_imgerror,
    "errortable": _cmd_errortable,
}


# values of these flags may start with '-' (negative coordinates)
_VECTOR_FLAGS = ("--bounds", "--slice")


def _join_vector_flags(argv):
    out = []
    it = iter(argv)
    for token in it:
        if token in _VECTOR_FLAGS:
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_vector_flags(argv))
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, FlatMeansError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 2
    return 0
