"""Benchmark pipeline: load -> similarity -> match -> threshold -> evaluate -> report."""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import loaders
from .assign import MatchConfig, match_dinf, match_hungarian, match_sink_d, match_sink_o
from .errors import UsageError
from .evalkit import apply_threshold, evaluate
from .simmatrix import cosine_similarity_matrix, dice_similarity_matrix
from .stable import match_bmat, match_smat

log = logging.getLogger(__name__)

MATCHERS = ("dinf", "hun", "sink-o", "sink-d", "smat", "bmat")
# matchers that always densify their input
DENSE_ONLY = frozenset({"hun", "sink-d"})
FORMATS = ("csv", "markdown")
COLUMNS = ("matcher", "theta", "precision", "recall", "f1", "predicted", "gold", "correct", "wall_ms")


def run_matcher(name, s, config):
    if name == "dinf":
        return match_dinf(s, config.direction)
    if name == "hun":
        return match_hungarian(s)
    if name == "sink-o":
        return match_sink_o(s, config)
    if name == "sink-d":
        return match_sink_d(s, config)
    if name == "smat":
        return match_smat(s)
    if name == "bmat":
        return match_bmat(s)
    raise UsageError(f"unknown matcher {name!r}; choose from {', '.join(MATCHERS)} or 'all'")


def expand_matchers(names):
    out = []
    for name in names:
        for item in MATCHERS if name == "all" else (name,):
            if item not in MATCHERS:
                raise UsageError(f"unknown matcher {item!r}")
            if item not in out:
                out.append(item)
    return tuple(out)


@dataclass
class RunSpec:
    """One benchmark invocation: a similarity source, matchers and output options."""

    gold: Path
    sim: Path | None = None
    emb_left: Path | None = None
    emb_right: Path | None = None
    names_left: Path | None = None
    names_right: Path | None = None
    similarity: str | None = None
    matchers: tuple = ("all",)
    config: MatchConfig = field(default_factory=MatchConfig)
    fmt: str = "markdown"
    out: Path | None = None
    timing: bool = False

    def validate(self):
        sources = [
            self.sim is not None,
            self.emb_left is not None or self.emb_right is not None,
            self.names_left is not None or self.names_right is not None,
        ]
        if sum(sources) != 1:
            raise UsageError("give exactly one of --sim, --emb-left/--emb-right, --names-left/--names-right")
        if sources[1]:
            if self.emb_left is None or self.emb_right is None:
                raise UsageError("--emb-left and --emb-right must be given together")
            if self.similarity != "cosine":
                raise UsageError("embedding input requires --similarity cosine")
        if sources[2]:
            if self.names_left is None or self.names_right is None:
                raise UsageError("--names-left and --names-right must be given together")
            if self.similarity != "dice":
                raise UsageError("name input requires --similarity dice")
        if sources[0] and self.similarity is not None:
            raise UsageError("--similarity only applies to embedding or name input")
        for path in (self.sim, self.emb_left, self.emb_right, self.names_left, self.names_right, self.gold):
            if path is not None and not Path(path).is_file():
                raise UsageError(f"no such file: {path}")
        if self.fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if not self.matchers:
            raise UsageError("no matcher selected")
        expand_matchers(self.matchers)


def load_matrix(spec):
    if spec.sim is not None:
        return loaders.load_similarity(spec.sim)
    if spec.emb_left is not None:
        return cosine_similarity_matrix(loaders.load_embeddings(spec.emb_left), loaders.load_embeddings(spec.emb_right))
    return dice_similarity_matrix(loaders.load_names(spec.names_left), loaders.load_names(spec.names_right))


def run(spec):
    """Evaluate every selected matcher on one shared similarity matrix.

    Reports come back in matcher-list order.  ``peak_pairs`` is the number of
    matrix cells the matcher held in memory (stored entries for the sparse
    path, ``m * n`` once densified).
    """
    spec.validate()
    s = load_matrix(spec)
    gold = loaders.load_gold(spec.gold)
    theta = spec.config.theta
    reports = []
    for name in expand_matchers(spec.matchers):
        start = time.perf_counter()
        alignment = run_matcher(name, s, spec.config)
        elapsed = (time.perf_counter() - start) * 1000.0
        kept = apply_threshold(alignment, theta)
        report = evaluate(kept, s.left, s.right, gold, theta=theta, matcher=name)
        report.wall_ms = elapsed if spec.timing else None
        report.peak_pairs = s.m * s.n if name in DENSE_ONLY else s.nnz
        log.info("%s: %d pairs, F1 %.1f", name, report.predicted, report.f1)
        reports.append(report)
    return reports


def _row(report):
    return [
        report.matcher,
        f"{report.theta:.2f}",
        f"{report.precision:.1f}",
        f"{report.recall:.1f}",
        f"{report.f1:.1f}",
        str(report.predicted),
        str(report.gold),
        str(report.correct),
        "" if report.wall_ms is None else f"{report.wall_ms:.1f}",
    ]


def emit_report(reports, fmt="markdown"):
    """Render reports as CSV or a markdown table (percentages to one decimal)."""
    if not reports:
        raise UsageError("no reports to emit")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for report in reports:
            writer.writerow(_row(report))
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(COLUMNS) + " |",
            "|" + "|".join(["---"] + ["---:"] * (len(COLUMNS) - 1)) + "|",
        ]
        lines += ["| " + " | ".join(_row(r)) + " |" for r in reports]
        lines += [
            "",
            "Percentages on a 0-100 scale. A predicted pair is correct iff it is a gold pair.",
        ]
        return "\n".join(lines) + "\n"
    raise UsageError(f"format must be one of {FORMATS}")


def execute(spec):
    """Run ``spec`` and write the rendered report to ``spec.out``.

    Returns the rendered text; nothing is written when ``spec.out`` is None.
    """
    text = emit_report(run(spec), spec.fmt)
    if spec.out is not None:
        Path(spec.out).write_text(text, encoding="utf-8")
    return text
