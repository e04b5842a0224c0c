"""Readers and writers for every file the CLI touches.

* points CSV: one point per line, comma separated, ``#`` comments
* flats text: ``N n`` header, then blank-line separated groups of n+1 rows
* model text (``WKMEANS 1``): a clustering with 17 significant digits
* ``.wkc``: little-endian binary compressed image
* binary netpbm: P6 (RGB) and P5 (gray), maxval 255
"""

from __future__ import annotations

import re
import struct

import numpy as np

from .codec import BLOCK, BLOCK_DIM, CompressedImage
from .errors import (
    EmptyFile,
    FlatMeansError,
    MalformedHeader,
    MalformedModel,
    ParseError,
    RaggedRows,
    UnsupportedFormat,
)
from .model import Clustering, Dataset, Flat, WeightVector

MODEL_HEADER = "WKMEANS 1"
WKC_MAGIC = b"WKC1"


def _float(token, line):
    try:
        return float(token.strip().replace("−", "-"))
    except ValueError:
        raise ParseError(f"cannot parse number {token.strip()!r}", line) from None


def _int(token, line):
    try:
        return int(token.strip())
    except ValueError:
        raise ParseError(f"cannot parse integer {token.strip()!r}", line) from None


def _g17(x) -> str:
    return format(float(x), ".17g")


# -- points and assignments -------------------------------------------------

def parse_points_csv(text: str) -> Dataset:
    rows = []
    arity = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        values = [_float(t, lineno) for t in line.split(",")]
        if arity is None:
            arity = len(values)
        elif len(values) != arity:
            raise RaggedRows(f"expected {arity} values, found {len(values)}", lineno)
        rows.append(values)
    if not rows:
        raise EmptyFile("no points in file")
    try:
        return Dataset(np.array(rows))
    except FlatMeansError as exc:
        raise ParseError(str(exc)) from None


def read_points_csv(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_points_csv(fh.read())


def write_points_csv(path, points):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in np.asarray(points, dtype=np.float64):
            fh.write(",".join(_g17(v) for v in p) + "\n")


def read_assignments(path) -> list:
    """One cluster index per line (blank and ``#`` lines skipped)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                out.append(_int(line, lineno))
    if not out:
        raise EmptyFile(f"no assignments in {path}")
    return out


def write_assignments(path, assignments):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(f"{int(a)}\n" for a in assignments))


# -- flats ---------------------------------------------------------------------

def parse_flats(text: str):
    """Return ``(flats, N, n)``; bases are checked for orthonormality."""
    lines = text.splitlines()
    header = None
    groups, current = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if header is None:
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("header must be 'N n'", lineno)
            header = (_int(parts[0], lineno), _int(parts[1], lineno))
            continue
        if not line:
            if current:
                groups.append(current)
                current = []
            continue
        current.append((lineno, line))
    if current:
        groups.append(current)
    if header is None:
        raise EmptyFile("flats file is empty")
    N, n = header
    if N < 1 or not 0 <= n < N:
        raise ParseError(f"invalid dimensions N={N}, n={n}", 1)
    if not groups:
        raise EmptyFile("no flats in file")
    flats = []
    for group in groups:
        if len(group) != n + 1:
            raise ParseError(f"flat needs {n + 1} rows, found {len(group)}", group[0][0])
        rows = []
        for lineno, line in group:
            values = [_float(t, lineno) for t in line.split()]
            if len(values) != N:
                raise ParseError(f"expected {N} coordinates, found {len(values)}", lineno)
            rows.append(values)
        flats.append(Flat(rows[0], np.array(rows[1:]).reshape(n, N)))
    return flats, N, n


def read_flats(path):
    with open(path, encoding="utf-8") as fh:
        return parse_flats(fh.read())


def write_flats(path, flats):
    flats = list(flats)
    N, n = flats[0].ambient_dim, flats[0].flat_dim
    parts = [f"{N} {n}"]
    for f in flats:
        rows = [f.center, *f.basis]
        parts.append("\n".join(" ".join(_g17(v) for v in r) for r in rows))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n\n".join(parts) + "\n")


# -- clustering model ------------------------------------------------------------

def format_model(clustering: Clustering) -> str:
    flats = clustering.flats
    N, n = flats[0].ambient_dim, flats[0].flat_dim
    out = [
        MODEL_HEADER,
        f"N {N}",
        f"n {n}",
        f"k {len(flats)}",
        "weights " + " ".join(_g17(w) for w in clustering.weights.weights),
        f"energy {_g17(clustering.energy)}",
        f"iterations {clustering.iterations_run}",
        f"converged {int(clustering.converged)}",
    ]
    for j, f in enumerate(flats):
        out.append(f"flat {j}")
        out.append(" ".join(_g17(v) for v in f.center))
        out.extend(" ".join(_g17(v) for v in row) for row in f.basis)
    out.append(f"assignments {clustering.assignments.size}")
    out.extend(str(int(a)) for a in clustering.assignments)
    return "\n".join(out) + "\n"


def parse_model(text: str) -> Clustering:
    lines = text.splitlines()
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise ParseError("unexpected end of model file", pos + 1)
        pos += 1
        return pos, lines[pos - 1].strip()

    def keyed(key):
        lineno, line = take()
        parts = line.split()
        if not parts or parts[0] != key:
            raise ParseError(f"expected '{key}'", lineno)
        return lineno, parts[1:]

    lineno, line = take()
    if line != MODEL_HEADER:
        raise ParseError(f"missing '{MODEL_HEADER}' header", lineno)
    scalars = {}
    for key in ("N", "n", "k"):
        lineno, rest = keyed(key)
        if len(rest) != 1:
            raise ParseError(f"'{key}' takes one value", lineno)
        scalars[key] = _int(rest[0], lineno)
    N, n, k = scalars["N"], scalars["n"], scalars["k"]
    lineno, rest = keyed("weights")
    weights = WeightVector([_float(t, lineno) for t in rest])
    lineno, rest = keyed("energy")
    energy = _float(rest[0], lineno) if len(rest) == 1 else None
    if energy is None:
        raise ParseError("'energy' takes one value", lineno)
    lineno, rest = keyed("iterations")
    iterations = _int(rest[0], lineno)
    lineno, rest = keyed("converged")
    converged = bool(_int(rest[0], lineno))

    def vector(size):
        lineno, line = take()
        values = [_float(t, lineno) for t in line.split()]
        if len(values) != size:
            raise ParseError(f"expected {size} values, found {len(values)}", lineno)
        return values

    flats = []
    for j in range(k):
        lineno, rest = keyed("flat")
        if rest != [str(j)]:
            raise ParseError(f"expected 'flat {j}'", lineno)
        center = vector(N)
        basis = [vector(N) for _ in range(n)]
        flats.append(Flat(center, np.array(basis).reshape(n, N)))
    lineno, rest = keyed("assignments")
    m = _int(rest[0], lineno)
    assignments = []
    for _ in range(m):
        lineno, line = take()
        assignments.append(_int(line, lineno))
    if any(line.strip() for line in lines[pos:]):
        raise ParseError("trailing content after assignments", pos + 1)
    return Clustering(assignments, flats, weights, energy, iterations_run=iterations, converged=converged)


def write_model(path, clustering: Clustering):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_model(clustering))


def read_model(path) -> Clustering:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# -- compressed images -------------------------------------------------------------

def encode_wkc(c: CompressedImage) -> bytes:
    c.validate()
    k, n = c.k, c.n
    if k > 0xFFFF:
        raise MalformedModel("at most 65535 clusters fit the format")
    parts = [
        WKC_MAGIC,
        struct.pack("<IIBBHH", c.width, c.height, c.pad_right, c.pad_bottom, k, n),
        struct.pack("<H", len(c.weights)),
        c.weights.weights.astype("<f8").tobytes(),
    ]
    for f in c.flats:
        parts.append(f.center.astype("<f8").tobytes())
        parts.append(f.basis.astype("<f8").tobytes())
    records = np.zeros(c.block_count, dtype=_record_dtype(n))
    records["id"] = c.cluster_ids
    if n:
        records["coef"] = c.coefficients
    parts.append(records.tobytes())
    return b"".join(parts)


def _record_dtype(n):
    fields = [("id", "<u2")]
    if n:
        fields.append(("coef", "<f4", (n,)))
    return np.dtype(fields)


def decode_wkc(data: bytes) -> CompressedImage:
    if data[:4] != WKC_MAGIC:
        raise MalformedModel("not a WKC1 file")
    head = struct.calcsize("<IIBBHHH")
    if len(data) < 4 + head:
        raise MalformedModel("truncated header")
    width, height, pad_r, pad_b, k, n, wlen = struct.unpack_from("<IIBBHHH", data, 4)
    pos = 4 + head
    if n >= BLOCK_DIM or wlen != n + 1 or k < 1:
        raise MalformedModel(f"inconsistent header: k={k}, n={n}, {wlen} weights")
    if (width + pad_r) % BLOCK or (height + pad_b) % BLOCK:
        raise MalformedModel("padded size is not a multiple of 8")
    blocks = ((width + pad_r) // BLOCK) * ((height + pad_b) // BLOCK)
    rec = _record_dtype(n)
    expected = pos + 8 * wlen + k * 8 * BLOCK_DIM * (n + 1) + blocks * rec.itemsize
    if len(data) != expected:
        raise MalformedModel(f"expected {expected} bytes, found {len(data)}")
    try:
        weights = WeightVector(np.frombuffer(data, "<f8", wlen, pos).astype(np.float64))
        pos += 8 * wlen
        flats = []
        for _ in range(k):
            arr = np.frombuffer(data, "<f8", BLOCK_DIM * (n + 1), pos).astype(np.float64)
            pos += 8 * BLOCK_DIM * (n + 1)
            arr = arr.reshape(n + 1, BLOCK_DIM)
            flats.append(Flat(arr[0], arr[1:]))
    except FlatMeansError as exc:
        raise MalformedModel(str(exc)) from None
    records = np.frombuffer(data, rec, blocks, pos)
    coef = records["coef"].astype(np.float32) if n else np.zeros((blocks, 0), dtype=np.float32)
    c = CompressedImage(
        width, height, pad_r, pad_b, weights, tuple(flats),
        records["id"].astype(np.int64), coef.reshape(blocks, n),
    )
    c.validate()
    return c


def write_wkc(path, c: CompressedImage):
    with open(path, "wb") as fh:
        fh.write(encode_wkc(c))


def read_wkc(path) -> CompressedImage:
    with open(path, "rb") as fh:
        return decode_wkc(fh.read())


# -- netpbm --------------------------------------------------------------------------

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def _parse_netpbm(data: bytes, magic: bytes, channels: int) -> np.ndarray:
    tokens = []
    pos = 0
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise MalformedHeader("incomplete header")
        tokens.append(m.group(1))
        pos = m.end()
    if tokens[0] != magic:
        if tokens[0] in (b"P1", b"P2", b"P3", b"P4", b"P5", b"P6", b"P7"):
            raise UnsupportedFormat(f"expected {magic.decode()}, found {tokens[0].decode()}")
        raise MalformedHeader("not a netpbm file")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeader("non-numeric size or maxval") from None
    if width < 1 or height < 1:
        raise MalformedHeader(f"invalid size {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"maxval {maxval} not supported (only 255)")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1
    size = width * height * channels
    if len(data) - pos < size:
        raise MalformedHeader(f"pixel data truncated: {len(data) - pos} of {size} bytes")
    pixels = np.frombuffer(data, np.uint8, size, pos)
    shape = (height, width, channels) if channels > 1 else (height, width)
    return pixels.reshape(shape).copy()


def decode_ppm(data: bytes) -> np.ndarray:
    return _parse_netpbm(data, b"P6", 3)


def decode_pgm(data: bytes) -> np.ndarray:
    return _parse_netpbm(data, b"P5", 1)


def encode_ppm(pixels) -> bytes:
    a = np.asarray(pixels)
    if a.ndim != 3 or a.shape[2] != 3:
        raise UnsupportedFormat(f"P6 needs an (height, width, 3) array, got {a.shape}")
    h, w = a.shape[:2]
    return b"P6\n%d %d\n255 " % (w, h) + np.ascontiguousarray(a, dtype=np.uint8).tobytes()


def encode_pgm(gray) -> bytes:
    a = np.asarray(gray)
    if a.ndim != 2:
        raise UnsupportedFormat(f"P5 needs a 2-d array, got {a.shape}")
    h, w = a.shape
    return b"P5\n%d %d\n255 " % (w, h) + np.ascontiguousarray(a, dtype=np.uint8).tobytes()


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_ppm(fh.read())


def write_ppm(path, pixels):
    with open(path, "wb") as fh:
        fh.write(encode_ppm(pixels))


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def write_pgm(path, gray):
    with open(path, "wb") as fh:
        fh.write(encode_pgm(gray))
