"""Tab-separated file formats.

Sparse similarity   ``left_id<TAB>right_id<TAB>score``
Dense similarity    ``#dense m n`` header, optional ``#cols<TAB>id...`` line,
                    then ``row_id<TAB>s_1 ... s_n`` per row
Embeddings          ``entity_id<TAB>v_1<TAB>...<TAB>v_d``
Names               ``entity_id<TAB>name``
Gold links          ``left_id<TAB>right_id``

Blank lines are ignored, as are ``#`` comment lines (except the dense
header).  Identifiers keep their order of first appearance.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DataError, ParseError
from .evalkit import GoldLinks
from .simmatrix import EmbeddingTable, EntityCatalog, NameTable, SimilarityMatrix


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            yield lineno, line


def _float(path, lineno, text):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, lineno, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}:{lineno}: non-finite value {text!r}")
    return value


def _catalog(path, lineno, ids):
    try:
        return EntityCatalog(ids)
    except DataError as exc:
        raise DataError(f"{path}:{lineno}: {exc}") from None


def load_similarity(path):
    """Load a sparse or dense similarity file (format is auto-detected)."""
    path = Path(path)
    for _, line in _lines(path):
        if line.startswith("#dense"):
            return _load_dense(path)
        if not line.startswith("#"):
            break
    return _load_sparse(path)


def _load_sparse(path):
    left, right = {}, {}
    rows, cols, scores = [], [], []
    seen = set()
    last = 0
    for lineno, line in _lines(path):
        last = lineno
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 3 tab-separated fields, got {len(parts)}")
        a, b, text = parts
        if not a or not b:
            raise ParseError(path, lineno, "empty entity id")
        value = _float(path, lineno, text)
        i = left.setdefault(a, len(left))
        j = right.setdefault(b, len(right))
        if (i, j) in seen:
            raise DataError(f"{path}:{lineno}: duplicate pair ({a!r}, {b!r})")
        seen.add((i, j))
        if value != 0.0:
            rows.append(i)
            cols.append(j)
            scores.append(value)
    if not left:
        raise ParseError(path, last, "no similarity entries")
    shape = (len(left), len(right))
    matrix = sp.csr_matrix(
        (np.array(scores, dtype=np.float64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=shape,
    )
    return SimilarityMatrix(matrix, EntityCatalog(left), EntityCatalog(right))


def _load_dense(path):
    lines = _lines(path)
    lineno, header = next(lines)
    fields = header.split()
    if len(fields) != 3 or fields[0] != "#dense":
        raise ParseError(path, lineno, "expected header '#dense m n'")
    try:
        m, n = int(fields[1]), int(fields[2])
    except ValueError:
        raise ParseError(path, lineno, "matrix dimensions must be integers") from None
    if m < 1 or n < 1:
        raise ParseError(path, lineno, "matrix dimensions must be positive")
    col_ids = [str(j) for j in range(n)]
    row_ids, values = [], []
    seen = set()
    for lineno, line in lines:
        if line.startswith("#cols"):
            if row_ids:
                raise ParseError(path, lineno, "#cols line must precede the rows")
            col_ids = line.split("\t")[1:]
            if len(col_ids) != n:
                raise ParseError(path, lineno, f"expected {n} column ids, got {len(col_ids)}")
            _catalog(path, lineno, col_ids)
            continue
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != n + 1:
            raise ParseError(path, lineno, f"expected row id and {n} scores, got {len(parts)} fields")
        if len(row_ids) == m:
            raise ParseError(path, lineno, f"more than {m} rows")
        if parts[0] in seen:
            raise DataError(f"{path}:{lineno}: duplicate entity id {parts[0]!r}")
        seen.add(parts[0])
        row_ids.append(parts[0])
        values.append([_float(path, lineno, x) for x in parts[1:]])
    if len(row_ids) != m:
        raise ParseError(path, lineno, f"expected {m} rows, got {len(row_ids)}")
    return SimilarityMatrix(
        np.array(values), EntityCatalog(row_ids), EntityCatalog(col_ids)
    )


def load_embeddings(path):
    path = Path(path)
    ids, vectors = [], []
    seen = set()
    dim = None
    for lineno, line in _lines(path):
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError(path, lineno, "expected an id followed by vector components")
        if dim is None:
            dim = len(parts) - 1
        elif len(parts) - 1 != dim:
            raise ParseError(path, lineno, f"expected {dim} components, got {len(parts) - 1}")
        if parts[0] in seen:
            raise DataError(f"{path}:{lineno}: duplicate entity id {parts[0]!r}")
        seen.add(parts[0])
        ids.append(parts[0])
        vectors.append([_float(path, lineno, x) for x in parts[1:]])
    if not ids:
        raise ParseError(path, 0, "no embeddings")
    return EmbeddingTable(EntityCatalog(ids), np.array(vectors))


def load_names(path):
    path = Path(path)
    ids, names = [], []
    seen = set()
    for lineno, line in _lines(path):
        if line.startswith("#"):
            continue
        ident, _, name = line.partition("\t")
        if not ident:
            raise ParseError(path, lineno, "empty entity id")
        if ident in seen:
            raise DataError(f"{path}:{lineno}: duplicate entity id {ident!r}")
        seen.add(ident)
        ids.append(ident)
        names.append(name)
    if not ids:
        raise ParseError(path, 0, "no names")
    return NameTable(EntityCatalog(ids), names)


def load_gold(path):
    path = Path(path)
    pairs, seen = [], set()
    for lineno, line in _lines(path):
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(path, lineno, "expected 'left_id<TAB>right_id'")
        pair = (parts[0], parts[1])
        if pair in seen:
            raise DataError(f"{path}:{lineno}: duplicate gold pair {pair!r}")
        seen.add(pair)
        pairs.append(pair)
    return GoldLinks(pairs)


def write_sparse(path, s):
    """Write the non-zero entries of ``s`` as triples.

    Entities without any non-zero score cannot be represented and are lost.
    """
    rows, cols, scores = s.entries()
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, v in zip(rows.tolist(), cols.tolist(), scores.tolist()):
            if v != 0.0:
                fh.write(f"{s.left.ids[i]}\t{s.right.ids[j]}\t{v!r}\n")


def write_dense(path, s):
    arr = s.array
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#dense {s.m} {s.n}\n")
        fh.write("#cols\t" + "\t".join(s.right.ids) + "\n")
        for i, ident in enumerate(s.left.ids):
            fh.write(ident + "\t" + "\t".join(repr(float(v)) for v in arr[i]) + "\n")
