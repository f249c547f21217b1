"""Stable-matching matchers: Gale-Shapley (SMat) and Bidirectional Matching (BMat)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assign import Alignment, _finalize, strip_padding
from .errors import UsageError
from .simmatrix import col_argmax, pad_to_square, row_argmax


@dataclass
class PreferenceOrders:
    """Per-row and per-column candidate lists, best first.

    Ties are ordered by ascending index.  Sparse matrices only list stored
    entries.
    """

    row_prefs: list
    col_prefs: list


def _grouped_order(group, other, scores, size):
    """Entry order sorted by (group, -score, other) plus group boundaries."""
    order = np.lexsort((other, -scores, group))
    bounds = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(group, minlength=size), out=bounds[1:])
    return order, bounds


def preference_orders(s):
    rows, cols, scores = s.entries()
    rorder, rb = _grouped_order(rows, cols, scores, s.m)
    corder, cb = _grouped_order(cols, rows, scores, s.n)
    row_prefs = [cols[rorder[rb[i]:rb[i + 1]]] for i in range(s.m)]
    col_prefs = [rows[corder[cb[j]:cb[j + 1]]] for j in range(s.n)]
    return PreferenceOrders(row_prefs, col_prefs)


def _csr_parts(s):
    if s.is_sparse:
        csr = s.csr
        return csr.indptr, csr.indices, csr.data
    arr = s.array
    indptr = np.arange(s.m + 1, dtype=np.int64) * s.n
    return indptr, np.tile(np.arange(s.n, dtype=np.int32), s.m), arr.ravel()


def _gale_shapley(s):
    """Row-proposing deferred acceptance over the stored entries of ``s``.

    Columns prefer higher scores, then lower row indices.  Returns, for each
    column, the row it ends up holding or -1.
    """
    indptr, indices, data = _csr_parts(s)
    owner = np.repeat(np.arange(s.m, dtype=np.int32), np.diff(indptr))
    # stable sort keeps ascending column order among equal scores
    proposals = np.lexsort((-data, owner))
    del owner
    # memoryviews give cheap scalar access without boxing whole arrays
    proposals = memoryview(proposals)
    cols = memoryview(np.ascontiguousarray(indices))
    score = memoryview(np.ascontiguousarray(data))
    nxt = np.array(indptr[:-1], dtype=np.int64)
    end = memoryview(np.ascontiguousarray(indptr[1:], dtype=np.int64))
    holder = np.full(s.n, -1, dtype=np.int64)
    hv, nv = memoryview(holder), memoryview(nxt)
    held = np.zeros(s.n)
    held_v = memoryview(held)

    for start in range(s.m):
        i = start
        while i >= 0:
            k = nv[i]
            if k == end[i]:
                break  # exhausted, stays single
            nv[i] = k + 1
            e = proposals[k]
            j = cols[e]
            v = score[e]
            h = hv[j]
            if h < 0:
                hv[j], held_v[j] = i, v
                i = -1
            elif v > held_v[j] or (v == held_v[j] and i < h):
                hv[j], held_v[j] = i, v
                i = h
    return holder


def match_smat(s):
    """Gale-Shapley stable matching with rows proposing.

    Non-square input is zero-padded to a square matrix first; pairs involving
    the padded dummy entities are discarded.
    """
    p = pad_to_square(strip_padding(s))
    holder = _gale_shapley(p)
    cols = np.flatnonzero(holder >= 0)
    return _finalize(p, holder[cols], cols, "smat")


def match_bmat(s):
    """Bidirectional matching: repeatedly pair mutual row/column argmaxes.

    Each pass visits the pending rows in ascending order; row ``r`` with best
    column ``c`` is matched when ``r`` is also the best row of ``c``, after
    which both are removed from further consideration.  A row whose best
    remaining score is not positive (or, on sparse input, that has no stored
    candidate left) is dropped as unmatched.  The input is never modified.
    """
    s = strip_padding(s)
    row_done = np.zeros(s.m, dtype=bool)
    col_done = np.zeros(s.n, dtype=bool)
    match_of = np.full(s.m, -1, dtype=np.int64)
    pending = np.arange(s.m)
    while pending.size:
        keep = np.zeros(pending.size, dtype=bool)
        for k, r in enumerate(pending.tolist()):
            best = row_argmax(s, r, col_done)
            if best is None or best[1] <= 0:
                continue
            c = best[0]
            back = col_argmax(s, c, row_done)
            if back is not None and back[0] == r:
                match_of[r] = c
                row_done[r] = True
                col_done[c] = True
            else:
                keep[k] = True
        pending = pending[keep]
    rows = np.flatnonzero(match_of >= 0)
    return _finalize(s, rows, match_of[rows], "bmat")


def is_stable(s, a):
    """True when no pair outside ``a`` blocks it.

    ``(i, j)`` blocks when ``S[i, j]`` strictly exceeds the scores of both
    current partners; an unmatched entity prefers any positive score.
    """
    if not a.is_one_to_one():
        raise UsageError("stability is only defined for 1-to-1 alignments")
    arr = s.array
    row_score = np.zeros(s.m)
    col_score = np.zeros(s.n)
    row_score[a.rows] = arr[a.rows, a.cols]
    col_score[a.cols] = arr[a.rows, a.cols]
    blocking = (arr > row_score[:, None]) & (arr > col_score[None, :])
    blocking[a.rows, a.cols] = False
    return not bool(blocking.any())
