"""Deterministic benchmark fixtures.

``python -m ealign.fixtures DIR`` regenerates the files shipped in ``fixtures/``.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .loaders import write_dense, write_sparse
from .simmatrix import EntityCatalog, SimilarityMatrix

TRAP = [
    [0.9, 0.6, 0.1, 0.1],
    [0.8, 0.7, 0.1, 0.1],
    [0.1, 0.1, 0.9, 0.2],
    [0.1, 0.2, 0.1, 0.9],
]

NAMES_LEFT = ["New_York_City", "Paris", "Los Angeles"]
NAMES_RIGHT = ["City of New York", "Paris (France)", "Los Angeles County"]


def _catalogs(m, n):
    return EntityCatalog([f"L{i}" for i in range(m)]), EntityCatalog([f"R{j}" for j in range(n)])


def identity(n=5):
    """``n x n`` identity similarities with diagonal gold links."""
    left, right = _catalogs(n, n)
    gold = [(f"L{i}", f"R{i}") for i in range(n)]
    return SimilarityMatrix(np.eye(n), left, right), gold


def many_to_one_trap():
    """Rows 0 and 1 share their best column; the gold links are diagonal."""
    left, right = _catalogs(4, 4)
    gold = [(f"L{i}", f"R{i}") for i in range(4)]
    return SimilarityMatrix(np.array(TRAP), left, right), gold


def paris_like(n=2000, density=0.01, seed=7, recall=0.9):
    """Sparse ``n x n`` matrix imitating the output of a probabilistic aligner.

    Each left entity has a planted partner; with probability ``recall`` the
    true pair is stored with a high score.  The remaining stored entries are
    noise drawn from a bimodal score distribution (mostly low, a few high) so
    that about ``density`` of all cells are non-zero.  Scores are rounded to
    six decimals so the matrix survives a text round-trip unchanged.
    """
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    per_row = max(density * n - recall, 0.0)
    rows, cols, vals = [], [], []
    for i in range(n):
        taken = set()
        if rng.random() < recall:
            taken.add(int(perm[i]))
            rows.append(i)
            cols.append(int(perm[i]))
            vals.append(rng.beta(8.0, 1.5))
        for j in rng.choice(n, size=rng.poisson(per_row), replace=False).tolist():
            if j in taken:
                continue
            taken.add(j)
            rows.append(i)
            cols.append(j)
            vals.append(rng.beta(5.0, 2.0) if rng.random() < 0.02 else rng.beta(1.2, 8.0))
    vals = np.maximum(np.round(np.array(vals), 6), 1e-6)
    left, right = _catalogs(n, n)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    gold = [(f"L{i}", f"R{perm[i]}") for i in range(n)]
    return SimilarityMatrix(matrix, left, right), gold


def _write_pairs(path, pairs):
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in pairs:
            fh.write(f"{a}\t{b}\n")


def _write_names(path, prefix, names):
    with open(path, "w", encoding="utf-8") as fh:
        for k, name in enumerate(names):
            fh.write(f"{prefix}{k}\t{name}\n")


def write_all(directory):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    s, gold = identity()
    write_sparse(out / "identity5.sim.tsv", s)
    _write_pairs(out / "identity5.gold.tsv", gold)
    s, gold = many_to_one_trap()
    write_dense(out / "trap4.sim.tsv", s)
    _write_pairs(out / "trap4.gold.tsv", gold)
    _write_names(out / "names3.left.tsv", "L", NAMES_LEFT)
    _write_names(out / "names3.right.tsv", "R", NAMES_RIGHT)
    _write_pairs(out / "names3.gold.tsv", [(f"L{i}", f"R{i}") for i in range(3)])
    s, gold = paris_like()
    write_sparse(out / "paris2k.sim.tsv", s)
    _write_pairs(out / "paris2k.gold.tsv", gold)


def main(argv=None):
    parser = argparse.ArgumentParser(description="Regenerate benchmark fixtures")
    parser.add_argument("directory", nargs="?", default="fixtures")
    args = parser.parse_args(argv)
    write_all(args.directory)


if __name__ == "__main__":
    main()
