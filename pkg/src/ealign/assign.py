"""Linear-assignment family of matchers: DInf, Hungarian, Sink-o and Sink-d."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

from .errors import ConfigurationError, NumericalError, UsageError
from .simmatrix import EntityCatalog, SimilarityMatrix, argmax_rows


class Alignment:
    """A set of matched ``(row, col, score)`` triples, sorted by ``(row, col)``.

    ``source`` tags the matcher that produced it.
    """

    def __init__(self, rows, cols, scores, source=""):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        scores = np.asarray(scores, dtype=np.float64).ravel()
        if not rows.size == cols.size == scores.size:
            raise UsageError("rows, cols and scores must have equal length")
        order = np.lexsort((cols, rows))
        rows, cols, scores = rows[order], cols[order], scores[order]
        if rows.size > 1:
            same = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if same.any():
                raise UsageError("alignment contains duplicate (row, col) pairs")
        for arr in (rows, cols, scores):
            arr.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.scores = scores
        self.source = source

    @classmethod
    def from_pairs(cls, s, pairs, source=""):
        """Build an alignment over ``s`` from ``(row, col)`` pairs."""
        pairs = list(pairs)
        rows = np.array([p[0] for p in pairs], dtype=np.int64)
        cols = np.array([p[1] for p in pairs], dtype=np.int64)
        return _finalize(s, rows, cols, source)

    @classmethod
    def empty(cls, source=""):
        return cls([], [], [], source)

    def __len__(self):
        return int(self.rows.size)

    def __iter__(self):
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), self.scores.tolist()):
            yield r, c, v

    def __eq__(self, other):
        if not isinstance(other, Alignment):
            return NotImplemented
        return (
            np.array_equal(self.rows, other.rows)
            and np.array_equal(self.cols, other.cols)
            and np.array_equal(self.scores, other.scores)
        )

    def __repr__(self):
        return f"Alignment({len(self)} pairs, source={self.source!r})"

    @property
    def pairs(self):
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    @property
    def objective(self):
        return float(self.scores.sum())

    def is_one_to_one(self):
        return (
            np.unique(self.rows).size == self.rows.size
            and np.unique(self.cols).size == self.cols.size
        )

    def select(self, mask, source=None):
        mask = np.asarray(mask, dtype=bool)
        return Alignment(
            self.rows[mask], self.cols[mask], self.scores[mask],
            self.source if source is None else source,
        )


def _finalize(s, rows, cols, source):
    """Drop out-of-range and dummy pairs, attach scores from ``s``."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size and (
        rows.min() < 0 or cols.min() < 0 or rows.max() >= s.m or cols.max() >= s.n
    ):
        raise UsageError("alignment index out of matrix bounds")
    keep = (rows < s.left.n_real) & (cols < s.right.n_real)
    rows, cols = rows[keep], cols[keep]
    return Alignment(rows, cols, s.scores_at(rows, cols), source)


def strip_padding(s):
    """The non-dummy block of a matrix produced by ``pad_to_square``."""
    m, n = s.left.n_real, s.right.n_real
    if (m, n) == s.shape:
        return s
    data = s.csr[:m, :n] if s.is_sparse else s.array[:m, :n]
    return SimilarityMatrix(
        data, EntityCatalog(s.left.ids[:m]), EntityCatalog(s.right.ids[:n])
    )


@dataclass(frozen=True)
class MatchConfig:
    """Knobs shared by all matchers.

    ``tau``/``sink_o_iters`` drive the Sinkhorn operator, the ``ot_*`` fields
    the entropic optimal-transport solver and ``theta`` the score threshold.
    """

    direction: str = "row"
    tau: float = 0.05
    sink_o_iters: int = 100
    ot_epsilon: float = 0.01
    ot_max_iters: int = 10000
    ot_tolerance: float = 1e-9
    theta: float = 0.5

    def __post_init__(self):
        if self.direction not in ("row", "col"):
            raise ConfigurationError(f"direction must be 'row' or 'col', got {self.direction!r}")
        for name in ("tau", "ot_epsilon", "ot_tolerance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be a positive number, got {value!r}")
        for name in ("sink_o_iters", "ot_max_iters"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigurationError(f"theta must lie in [0, 1], got {self.theta!r}")


@dataclass
class DoublyStochasticMatrix:
    """Normalised transport plan.

    Rows sum to 1 and columns to ``m / n``; ``deviation`` is the largest
    absolute marginal error actually achieved.
    """

    plan: np.ndarray
    converged: bool
    iterations: int
    deviation: float


def _marginal_deviation(plan):
    m, n = plan.shape
    return max(
        float(np.max(np.abs(plan.sum(axis=1) - 1.0))),
        float(np.max(np.abs(plan.sum(axis=0) - m / n))),
    )


def match_dinf(s, direction="row"):
    """Greedy matching: every row (or column) takes its argmax partner.

    Many rows may pick the same column.  On sparse input a row without a
    positive stored entry stays unmatched.
    """
    s = strip_padding(s)
    if direction == "row":
        cols, _, valid = argmax_rows(s)
        rows = np.flatnonzero(valid)
        cols = cols[valid]
    elif direction == "col":
        rows, _, valid = argmax_rows(s.transpose())
        cols = np.flatnonzero(valid)
        rows = rows[valid]
    else:
        raise ConfigurationError(f"direction must be 'row' or 'col', got {direction!r}")
    return _finalize(s, rows, cols, "dinf")


def match_hungarian(s):
    """Maximum-weight 1-to-1 assignment of ``min(m, n)`` pairs.

    Sparse input is densified.  The solver is SciPy's shortest augmenting
    path implementation, which handles rectangular input directly.
    """
    s = strip_padding(s).to_dense()
    rows, cols = linear_sum_assignment(s.array, maximize=True)
    return _finalize(s, rows, cols, "hun")


def sinkhorn_operator(s, tau=0.05, k=100, tolerance=1e-9):
    """``k`` rounds of row-then-column normalisation of ``exp(S / tau)``.

    Runs in the log domain and ends with one extra row normalisation, so rows
    sum to 1 exactly (up to rounding) and columns approximately to ``m / n``.
    """
    if not tau > 0:
        raise ConfigurationError(f"tau must be positive, got {tau!r}")
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k!r}")
    arr = s.to_dense().array
    m, n = arr.shape
    with np.errstate(over="ignore"):
        logp = arr / tau
    if not np.all(np.isfinite(logp)):
        raise NumericalError(f"S / tau overflows for tau={tau!r}")
    col_shift = math.log(m / n)
    for _ in range(int(k)):
        logp -= logsumexp(logp, axis=1, keepdims=True)
        logp -= logsumexp(logp, axis=0, keepdims=True) - col_shift
    logp -= logsumexp(logp, axis=1, keepdims=True)
    plan = np.exp(logp)
    if not np.all(np.isfinite(plan)) or np.any(plan.sum(axis=1) <= 0):
        raise NumericalError(f"Sinkhorn operator underflowed for tau={tau!r}")
    deviation = _marginal_deviation(plan)
    return DoublyStochasticMatrix(plan, deviation < tolerance, int(k), deviation)


def _row_chunks(indptr, target):
    """Split rows into ranges holding roughly ``target`` stored entries each."""
    m = indptr.size - 1
    chunks, r0 = [], 0
    while r0 < m:
        r1 = int(np.searchsorted(indptr, indptr[r0] + target, side="right")) - 1
        r1 = min(max(r1, r0 + 1), m)
        chunks.append((r0, r1))
        r0 = r1
    return chunks


class _ImplicitKernel:
    """``K = exp(S / tau)`` of a sparse ``S`` where absent cells count as ``exp(0) = 1``.

    Row and column sums of ``diag(u) K diag(v)`` are computed in the log
    domain by sweeping the CSR arrays in row chunks of about one dense row,
    so no per-entry state is ever allocated.
    """

    def __init__(self, csr, tau):
        self.indptr, self.cols, self.data = csr.indptr, csr.indices, csr.data
        self.m, self.n = csr.shape
        self.inv_tau = 1.0 / tau
        self.chunks = _row_chunks(self.indptr, max(self.n, self.m))

    def _chunk(self, r0, r1):
        p0, p1 = self.indptr[r0], self.indptr[r1]
        local = np.repeat(np.arange(r1 - r0), np.diff(self.indptr[r0:r1 + 1]))
        return local, self.cols[p0:p1], self.data[p0:p1] * self.inv_tau

    def log_row_sums(self, lv):
        top = lv.max()
        w = np.exp(lv - top)
        total_w = w.sum()
        out = np.empty(self.m)
        for r0, r1 in self.chunks:
            local, cols, x = self._chunk(r0, r1)
            size = r1 - r0
            absent = np.maximum(total_w - np.bincount(local, weights=w[cols], minlength=size), 0.0)
            with np.errstate(divide="ignore"):
                log_absent = np.log(absent)
            x += lv[cols] - top
            shift = log_absent.copy()
            np.maximum.at(shift, local, x)
            x -= shift[local]
            np.exp(x, out=x)
            total = np.bincount(local, weights=x, minlength=size) + np.exp(log_absent - shift)
            out[r0:r1] = top + shift + np.log(total)
        return out

    def log_col_sums(self, lu):
        top = lu.max()
        w = np.exp(lu - top)
        stored_w = np.zeros(self.n)
        shift = np.full(self.n, -np.inf)
        for r0, r1 in self.chunks:
            local, cols, x = self._chunk(r0, r1)
            rows = local + r0
            stored_w += np.bincount(cols, weights=w[rows], minlength=self.n)
            x += lu[rows] - top
            np.maximum.at(shift, cols, x)
        absent = np.maximum(w.sum() - stored_w, 0.0)
        with np.errstate(divide="ignore"):
            log_absent = np.log(absent)
        np.maximum(shift, log_absent, out=shift)
        total = np.exp(log_absent - shift)
        for r0, r1 in self.chunks:
            local, cols, x = self._chunk(r0, r1)
            x += lu[local + r0] - top
            x -= shift[cols]
            np.exp(x, out=x)
            total += np.bincount(cols, weights=x, minlength=self.n)
        return top + shift + np.log(total)


def _sink_o_sparse(s, tau, k):
    """Row argmax of the Sinkhorn operator without materialising the plan."""
    csr = s.csr
    m, n = s.shape
    if not np.isfinite(np.abs(csr.data).max() / tau):
        raise NumericalError(f"S / tau overflows for tau={tau!r}")
    kernel = _ImplicitKernel(csr, tau)
    col_shift = math.log(m / n)
    lv = np.zeros(n)
    for _ in range(int(k)):
        lu = -kernel.log_row_sums(lv)
        lv = col_shift - kernel.log_col_sums(lu)
    # u_i does not change the argmax of row i
    best = np.empty(m, dtype=np.int64)
    row = np.empty(n)
    for i in range(m):
        start, stop = csr.indptr[i], csr.indptr[i + 1]
        row[:] = lv
        row[csr.indices[start:stop]] += csr.data[start:stop] / tau
        best[i] = np.argmax(row)
    return best


def match_sink_o(s, config=None):
    """DInf (row direction) applied to the Sinkhorn operator output.

    Sparse matrices are handled without densifying; absent entries carry the
    weight ``exp(0)`` exactly as in the dense operator.
    """
    config = config or MatchConfig()
    s = strip_padding(s)
    if s.is_sparse:
        cols = _sink_o_sparse(s, config.tau, config.sink_o_iters)
    else:
        plan = sinkhorn_operator(s, config.tau, config.sink_o_iters).plan
        cols = np.argmax(plan, axis=1)
    return _finalize(s, np.arange(s.m), cols, "sink-o")


def _sinkhorn_log(k_log, max_iters, tolerance, check_every):
    m, n = k_log.shape
    la, lb = -math.log(m), -math.log(n)
    lu, lv = np.zeros(m), np.zeros(n)
    dev = math.inf
    it = 0
    while it < max_iters:
        it += 1
        lu = la - logsumexp(k_log + lv[None, :], axis=1)
        lv = lb - logsumexp(k_log + lu[:, None], axis=0)
        if it % check_every == 0 or it == max_iters:
            rows = np.exp(logsumexp(k_log + lv[None, :], axis=1) + lu)
            dev = float(np.max(np.abs(rows * m - 1.0)))
            if dev < tolerance:
                break
    return np.exp(k_log + lu[:, None] + lv[None, :]) * m, it, dev


def _sinkhorn_stabilized(k_log, max_iters, tolerance, check_every, absorb=1e50):
    """Multiplicative Sinkhorn-Knopp with occasional absorption into log potentials."""
    m, n = k_log.shape
    a, b = 1.0 / m, 1.0 / n
    lo = 1.0 / absorb
    f, g = np.zeros(m), np.zeros(n)
    kernel = np.exp(k_log)
    u, v = np.ones(m), np.ones(n)
    kv = kernel @ v
    dev = math.inf
    it = 0
    while it < max_iters:
        it += 1
        u = a / kv
        v = b / (kernel.T @ u)
        if u.max() > absorb or v.max() > absorb or u.min() < lo or v.min() < lo:
            f += np.log(u)
            g += np.log(v)
            kernel = np.exp(k_log + f[:, None] + g[None, :])
            u, v = np.ones(m), np.ones(n)
        kv = kernel @ v
        if it % check_every == 0 or it == max_iters:
            # rows of the current plan sum to u * kv; columns are exact
            dev = float(np.max(np.abs(u * kv * m - 1.0)))
            if dev < tolerance:
                break
    plan = (u[:, None] * kernel * v[None, :]) * m
    return plan, it, dev


def sinkhorn_distance_plan(s, epsilon=0.01, max_iters=10000, tolerance=1e-9, check_every=10):
    """Entropy-regularised optimal transport plan between uniform marginals.

    Maximises ``<P, S> + epsilon * H(P)`` with Sinkhorn-Knopp iterations until
    the row marginals of the rescaled plan are within ``tolerance`` of 1 or
    ``max_iters`` is reached.  The returned plan is multiplied by ``m`` so
    that rows sum to 1; non-convergence is flagged, not raised.
    """
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon!r}")
    arr = s.to_dense().array
    with np.errstate(over="ignore"):
        k_log = (arr - arr.max()) / epsilon
    if not np.all(np.isfinite(k_log)):
        raise NumericalError(f"S / epsilon overflows for epsilon={epsilon!r}")
    check_every = max(1, min(int(check_every), int(max_iters)))
    if -k_log.min() < 500:
        plan, it, dev = _sinkhorn_stabilized(k_log, int(max_iters), tolerance, check_every)
    else:
        plan, it, dev = _sinkhorn_log(k_log, int(max_iters), tolerance, check_every)
    if not np.all(np.isfinite(plan)):
        raise NumericalError("Sinkhorn-Knopp produced non-finite values")
    return DoublyStochasticMatrix(plan, dev < tolerance, it, dev)


def match_sink_d(s, config=None):
    """DInf (row direction) over the entropic OT plan; densifies sparse input."""
    config = config or MatchConfig()
    s = strip_padding(s).to_dense()
    plan = sinkhorn_distance_plan(
        s, config.ot_epsilon, config.ot_max_iters, config.ot_tolerance
    ).plan
    return _finalize(s, np.arange(s.m), np.argmax(plan, axis=1), "sink-d")
