"""Command-line entry point.

Exit status: 0 on success, 2 on usage or validation errors, 1 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .assign import MatchConfig
from .bench import FORMATS, MATCHERS, RunSpec, execute
from .errors import ConfigurationError, DataError, UsageError

log = logging.getLogger("ealign")


def build_parser():
    defaults = MatchConfig()
    p = argparse.ArgumentParser(
        prog="ealign",
        description="Run entity-alignment matchers on a similarity matrix and score them against gold links.",
    )
    src = p.add_argument_group("similarity source (exactly one)")
    src.add_argument("--sim", type=Path, help="precomputed similarity file (sparse triples or '#dense m n')")
    src.add_argument("--emb-left", type=Path, help="left embedding table")
    src.add_argument("--emb-right", type=Path, help="right embedding table")
    src.add_argument("--names-left", type=Path, help="left entity names")
    src.add_argument("--names-right", type=Path, help="right entity names")
    src.add_argument("--similarity", choices=("cosine", "dice"),
                     help="estimator for embedding (cosine) or name (dice) input")
    p.add_argument("--gold", type=Path, required=True, help="gold links file")
    p.add_argument("--matcher", action="append", choices=MATCHERS + ("all",),
                   help="matcher to run; repeatable (default: all)")
    p.add_argument("--theta", type=float, default=defaults.theta, help="score threshold (default: %(default)s)")
    p.add_argument("--direction", choices=("row", "col"), default=defaults.direction,
                   help="DInf direction (default: %(default)s)")
    p.add_argument("--tau", type=float, default=defaults.tau, help="Sinkhorn operator temperature")
    p.add_argument("--iters", type=int, default=defaults.sink_o_iters, help="Sinkhorn operator iterations")
    p.add_argument("--epsilon", type=float, default=defaults.ot_epsilon, help="entropic OT regularisation")
    p.add_argument("--ot-max-iters", type=int, default=defaults.ot_max_iters)
    p.add_argument("--ot-tol", type=float, default=defaults.ot_tolerance)
    p.add_argument("--format", choices=FORMATS, default="markdown", dest="fmt")
    p.add_argument("--out", type=Path, help="output file (default: standard output)")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column (output is then not reproducible)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = MatchConfig(
            direction=args.direction, tau=args.tau, sink_o_iters=args.iters,
            ot_epsilon=args.epsilon, ot_max_iters=args.ot_max_iters,
            ot_tolerance=args.ot_tol, theta=args.theta,
        )
        spec = RunSpec(
            gold=args.gold, sim=args.sim, emb_left=args.emb_left, emb_right=args.emb_right,
            names_left=args.names_left, names_right=args.names_right,
            similarity=args.similarity, matchers=tuple(args.matcher or ("all",)),
            config=config, fmt=args.fmt, out=args.out, timing=args.timing,
        )
        text = execute(spec)
    except (UsageError, ConfigurationError) as exc:
        print(f"ealign: error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"ealign: data error: {exc}", file=sys.stderr)
        return 1
    if spec.out is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
