"""Threshold refinement and precision / recall / F1 against gold links."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import ConfigurationError, DataError

log = logging.getLogger(__name__)


class GoldLinks:
    """Ground-truth ``(left_id, right_id)`` pairs.

    A left id may appear in several pairs; gold sets need not be bijective.
    """

    def __init__(self, pairs):
        pairs = [(str(a), str(b)) for a, b in pairs]
        unique = frozenset(pairs)
        if len(unique) != len(pairs):
            raise DataError("gold links contain duplicate pairs")
        self.pairs = unique

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return pair in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))


@dataclass
class EvalReport:
    """Scores of one matcher run; percentages are on a 0-100 scale."""

    matcher: str
    theta: float
    precision: float
    recall: float
    f1: float
    predicted: int
    gold: int
    correct: int
    wall_ms: float | None = None
    peak_pairs: int | None = field(default=None, compare=False)


def apply_threshold(a, theta):
    """Keep the pairs whose score is at least ``theta``."""
    if not 0.0 <= theta <= 1.0:
        raise ConfigurationError(f"theta must lie in [0, 1], got {theta!r}")
    return a.select(a.scores >= theta)


def f1_score(precision, recall):
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate(a, left, right, gold, theta=0.0, matcher=None):
    """Compare an alignment over catalogs ``left``/``right`` with ``gold``.

    A predicted pair counts as correct iff its identifier pair is a gold pair.
    Gold pairs whose ids appear in neither catalog still count towards the
    recall denominator.
    """
    orphans = sum(1 for x, y in gold.pairs if x not in left and y not in right)
    if orphans:
        log.warning("%d gold pair(s) reference ids absent from both catalogs", orphans)
    predicted = len(a)
    correct = sum(
        1
        for r, c in zip(a.rows.tolist(), a.cols.tolist())
        if (left.ids[r], right.ids[c]) in gold.pairs
    )
    precision = 100.0 * correct / predicted if predicted else 0.0
    recall = 100.0 * correct / len(gold) if len(gold) else 0.0
    return EvalReport(
        matcher=matcher if matcher is not None else a.source,
        theta=float(theta),
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        predicted=predicted,
        gold=len(gold),
        correct=correct,
    )
