"""Similarity matrices between two entity sets.

A :class:`SimilarityMatrix` is backed either by a dense ``float64`` array or by
a CSR sparse matrix.  In the sparse case an absent entry has score 0 but is
*not a candidate*: argmax queries over a row (or column) whose stored entries
are exhausted return ``None`` instead of an arbitrary zero-score column.
"""

from __future__ import annotations

import re
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DataError, UsageError

PAD_PREFIX = "\x00pad:"


class EntityCatalog:
    """Ordered, duplicate-free entity identifiers of one side of the matrix.

    The last ``dummies`` entries are padding placeholders introduced by
    :func:`pad_to_square`; matchers drop every pair touching them.
    """

    def __init__(self, ids, dummies=0):
        ids = tuple(str(x) for x in ids)
        if not ids:
            raise DataError("entity catalog must contain at least one entity")
        index_of = {}
        for k, ident in enumerate(ids):
            if ident in index_of:
                raise DataError(f"duplicate entity id {ident!r}")
            index_of[ident] = k
        if not 0 <= dummies <= len(ids):
            raise UsageError(f"invalid dummy count {dummies}")
        self._ids = ids
        self._index_of = index_of
        self.dummies = int(dummies)

    @classmethod
    def range(cls, size, prefix=""):
        return cls([f"{prefix}{k}" for k in range(size)])

    @property
    def ids(self):
        return self._ids

    def index_of(self, ident):
        return self._index_of[ident]

    def __contains__(self, ident):
        return ident in self._index_of

    def __len__(self):
        return len(self._ids)

    def __iter__(self):
        return iter(self._ids)

    def __eq__(self, other):
        if not isinstance(other, EntityCatalog):
            return NotImplemented
        return self._ids == other._ids and self.dummies == other.dummies

    def __hash__(self):
        return hash((self._ids, self.dummies))

    def __repr__(self):
        return f"EntityCatalog(size={len(self)}, dummies={self.dummies})"

    @property
    def n_real(self):
        return len(self._ids) - self.dummies

    def is_dummy(self, k):
        return k >= self.n_real

    def padded(self, extra):
        """Return a copy with ``extra`` dummy entries appended."""
        if extra == 0:
            return self
        start = self.dummies
        pads = [f"{PAD_PREFIX}{start + k}" for k in range(extra)]
        return EntityCatalog(self._ids + tuple(pads), self.dummies + extra)


class SimilarityMatrix:
    """Pairwise entity similarities ``S[i, j]`` with catalogs for both sides.

    Parameters
    ----------
    data : array_like or scipy.sparse matrix
        Scores, shape ``(m, n)``.  Sparse input is converted to canonical CSR
        (sorted indices, no explicit zeros, no duplicates).
    left, right : EntityCatalog, optional
        Identifier catalogs; default to ``"0".."m-1"`` / ``"0".."n-1"``.
    """

    def __init__(self, data, left=None, right=None):
        if sp.issparse(data):
            csr = sp.csr_matrix(data, dtype=np.float64, copy=True)
            if not csr.has_canonical_format:
                # summing would silently merge duplicate keys
                probe = csr.copy()
                probe.sum_duplicates()
                if probe.nnz != csr.nnz:
                    raise DataError("sparse matrix contains duplicate (row, col) entries")
                csr = probe
            csr.eliminate_zeros()
            csr.sort_indices()
            if not np.all(np.isfinite(csr.data)):
                raise DataError("similarity matrix contains non-finite scores")
            self._dense = None
            self._csr = csr
        else:
            arr = np.array(data, dtype=np.float64)
            if arr.ndim != 2:
                raise DataError(f"similarity matrix must be 2-D, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise DataError("similarity matrix contains non-finite scores")
            arr.setflags(write=False)
            self._dense = arr
            self._csr = None
        m, n = self.shape
        if m < 1 or n < 1:
            raise DataError(f"similarity matrix must be non-empty, got shape {(m, n)}")
        self.left = left if left is not None else EntityCatalog.range(m)
        self.right = right if right is not None else EntityCatalog.range(n)
        if len(self.left) != m or len(self.right) != n:
            raise DataError(
                f"catalog sizes ({len(self.left)}, {len(self.right)}) "
                f"do not match matrix shape {(m, n)}"
            )

    @classmethod
    def from_triples(cls, rows, cols, scores, shape, left=None, right=None):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        scores = np.asarray(scores, dtype=np.float64)
        keys = rows * shape[1] + cols
        if np.unique(keys).size != keys.size:
            raise DataError("duplicate (row, col) entries")
        coo = sp.coo_matrix((scores, (rows, cols)), shape=shape)
        return cls(coo.tocsr(), left, right)

    @property
    def shape(self):
        if self._dense is not None:
            return self._dense.shape
        return self._csr.shape

    @property
    def m(self):
        return self.shape[0]

    @property
    def n(self):
        return self.shape[1]

    @property
    def is_sparse(self):
        return self._csr is not None

    @property
    def nnz(self):
        """Stored entries (all cells for a dense matrix)."""
        if self._csr is not None:
            return self._csr.nnz
        return self.m * self.n

    @property
    def csr(self):
        if self._csr is None:
            raise UsageError("matrix is dense-backed")
        return self._csr

    @cached_property
    def csc(self):
        return self.csr.tocsc()

    @property
    def array(self):
        """Dense read-only view; densifies a sparse matrix (not cached)."""
        if self._dense is not None:
            return self._dense
        arr = self._csr.toarray()
        arr.setflags(write=False)
        return arr

    @cached_property
    def _dense_twin(self):
        return SimilarityMatrix(self.array, self.left, self.right)

    def to_dense(self):
        """Dense-backed matrix with the same scores and catalogs."""
        if self._dense is not None:
            return self
        return self._dense_twin

    def to_sparse(self):
        if self._csr is not None:
            return self
        return SimilarityMatrix(sp.csr_matrix(self._dense), self.left, self.right)

    def transpose(self):
        data = self._dense.T if self._dense is not None else self._csr.T
        return SimilarityMatrix(data, self.right, self.left)

    def get(self, i, j):
        if self._dense is not None:
            return float(self._dense[i, j])
        start, stop = self._csr.indptr[i], self._csr.indptr[i + 1]
        cols = self._csr.indices[start:stop]
        k = np.searchsorted(cols, j)
        if k < cols.size and cols[k] == j:
            return float(self._csr.data[start + k])
        return 0.0

    def scores_at(self, rows, cols):
        """Vectorised ``S[rows[k], cols[k]]``."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if self._dense is not None:
            return self._dense[rows, cols].astype(np.float64)
        out = np.zeros(rows.size)
        indptr, indices, data = self._csr.indptr, self._csr.indices, self._csr.data
        for k in range(rows.size):
            start, stop = indptr[rows[k]], indptr[rows[k] + 1]
            pos = start + np.searchsorted(indices[start:stop], cols[k])
            if pos < stop and indices[pos] == cols[k]:
                out[k] = data[pos]
        return out

    def row(self, i, out=None):
        """Row ``i`` as a dense buffer (densified on the fly when sparse)."""
        if self._dense is not None:
            if out is None:
                return self._dense[i]
            out[:] = self._dense[i]
            return out
        if out is None:
            out = np.zeros(self.n)
        else:
            out[:] = 0.0
        start, stop = self._csr.indptr[i], self._csr.indptr[i + 1]
        out[self._csr.indices[start:stop]] = self._csr.data[start:stop]
        return out

    def row_entries(self, i):
        """Stored ``(cols, scores)`` of row ``i``; all cells when dense."""
        if self._dense is not None:
            return np.arange(self.n), self._dense[i]
        start, stop = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[start:stop], self._csr.data[start:stop]

    def col_entries(self, j):
        if self._dense is not None:
            return np.arange(self.m), self._dense[:, j]
        csc = self.csc
        start, stop = csc.indptr[j], csc.indptr[j + 1]
        return csc.indices[start:stop], csc.data[start:stop]

    def entries(self):
        """Stored cells as ``(rows, cols, scores)`` in row-major order."""
        if self._dense is not None:
            rows, cols = np.divmod(np.arange(self.m * self.n), self.n)
            return rows, cols, self._dense.ravel()
        csr = self._csr
        rows = np.repeat(np.arange(self.m), np.diff(csr.indptr))
        return rows, csr.indices.astype(np.int64), csr.data

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"SimilarityMatrix({self.m}x{self.n}, {kind}, nnz={self.nnz})"


def _check_index(i, size, what):
    if not 0 <= i < size:
        raise UsageError(f"{what} index {i} out of range [0, {size})")


def _argmax_entries(idx, vals, excluded, sparse):
    if excluded is not None and idx.size:
        keep = ~excluded[idx]
        idx, vals = idx[keep], vals[keep]
    if sparse:
        keep = vals > 0
        idx, vals = idx[keep], vals[keep]
    if idx.size == 0:
        return None
    k = int(np.argmax(vals))  # first maximum; idx is ascending
    return int(idx[k]), float(vals[k])


def row_argmax(s, i, excluded_cols=None):
    """Best non-excluded column of row ``i`` as ``(col, score)``.

    Ties go to the smallest column index.  On a sparse matrix the result is
    ``None`` once no positive stored entry remains; a dense matrix always
    yields a column unless every column is excluded.
    """
    _check_index(i, s.m, "row")
    idx, vals = s.row_entries(i)
    return _argmax_entries(idx, vals, excluded_cols, s.is_sparse)


def col_argmax(s, j, excluded_rows=None):
    """Column counterpart of :func:`row_argmax`."""
    _check_index(j, s.n, "column")
    idx, vals = s.col_entries(j)
    return _argmax_entries(idx, vals, excluded_rows, s.is_sparse)


def argmax_rows(s):
    """:func:`row_argmax` for every row at once.

    Returns ``(cols, scores, valid)``; ``valid[i]`` is False where the row has
    no candidate.
    """
    if not s.is_sparse:
        arr = s.array
        cols = np.argmax(arr, axis=1)
        return cols, arr[np.arange(s.m), cols], np.ones(s.m, dtype=bool)
    csr = s.csr
    cols = np.zeros(s.m, dtype=np.int64)
    scores = np.zeros(s.m)
    valid = np.zeros(s.m, dtype=bool)
    for i in range(s.m):
        start, stop = csr.indptr[i], csr.indptr[i + 1]
        if start == stop:
            continue
        vals = csr.data[start:stop]
        k = int(np.argmax(vals))
        if vals[k] > 0:
            cols[i] = csr.indices[start + k]
            scores[i] = vals[k]
            valid[i] = True
    return cols, scores, valid


def pad_to_square(s):
    """Append zero rows or columns so the matrix becomes square.

    Appended indices are flagged as dummies in the returned catalogs.
    """
    m, n = s.shape
    if m == n:
        return s
    size = max(m, n)
    if s.is_sparse:
        csr = s.csr
        indptr = np.concatenate([csr.indptr, np.full(size - m, csr.indptr[-1])])
        data = sp.csr_matrix((csr.data, csr.indices, indptr), shape=(size, size))
    else:
        data = np.zeros((size, size))
        data[:m, :n] = s.array
    return SimilarityMatrix(data, s.left.padded(size - m), s.right.padded(size - n))


class EmbeddingTable:
    """Entity embedding vectors, one row per catalog entry."""

    def __init__(self, catalog, vectors):
        vectors = np.array(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(catalog):
            raise DataError(
                f"expected {len(catalog)} vectors, got array of shape {vectors.shape}"
            )
        if vectors.shape[1] < 1:
            raise DataError("embedding dimension must be at least 1")
        if not np.all(np.isfinite(vectors)):
            raise DataError("embedding table contains non-finite entries")
        vectors.setflags(write=False)
        self.catalog = catalog
        self.vectors = vectors

    @property
    def dim(self):
        return self.vectors.shape[1]


class NameTable:
    """One (possibly empty) name per catalog entry."""

    def __init__(self, catalog, names):
        names = tuple(names)
        if len(names) != len(catalog):
            raise DataError(f"expected {len(catalog)} names, got {len(names)}")
        self.catalog = catalog
        self.names = names


def cosine_similarity_matrix(a, b):
    """Dense cosine similarities between two embedding tables.

    Rows with zero norm score 0 against everything.
    """
    if a.dim != b.dim:
        raise ConfigurationError(f"embedding dimensions differ: {a.dim} vs {b.dim}")

    def unit(v):
        norms = np.linalg.norm(v, axis=1)
        safe = np.where(norms > 0, norms, 1.0)
        return v / safe[:, None]

    scores = unit(a.vectors) @ unit(b.vectors).T
    return SimilarityMatrix(scores, a.catalog, b.catalog)


_DEFAULT_SPLIT = re.compile(r"[\W_]+")


def tokenize_name(name, delimiters=None):
    """Lower-cased token set of ``name``.

    By default the name is split on every non-alphanumeric character.  Passing
    ``delimiters`` (a string of characters) splits on those characters only.
    """
    if delimiters is None:
        parts = _DEFAULT_SPLIT.split(name.lower())
    else:
        parts = re.split("[" + re.escape(delimiters) + "]+", name.lower())
    return frozenset(p for p in parts if p)


def dice_similarity_matrix(a, b, delimiters=None):
    """Dense Sorensen-Dice coefficients between the token sets of two name tables.

    Two empty token sets score 0.
    """
    vocab = {}

    def incidence(table):
        indptr, indices = [0], []
        for name in table.names:
            for tok in sorted(tokenize_name(name, delimiters)):
                indices.append(vocab.setdefault(tok, len(vocab)))
            indptr.append(len(indices))
        return indptr, indices

    pa, ia = incidence(a)
    pb, ib = incidence(b)
    vsize = max(len(vocab), 1)
    xa = sp.csr_matrix((np.ones(len(ia)), ia, pa), shape=(len(a.names), vsize))
    xb = sp.csr_matrix((np.ones(len(ib)), ib, pb), shape=(len(b.names), vsize))
    inter = (xa @ xb.T).toarray()
    denom = np.diff(pa)[:, None] + np.diff(pb)[None, :]
    scores = np.divide(2.0 * inter, denom, out=np.zeros(inter.shape), where=denom > 0)
    return SimilarityMatrix(scores, a.catalog, b.catalog)
