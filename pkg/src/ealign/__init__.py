"""Matching algorithms for knowledge-graph entity alignment."""

from .assign import (
    Alignment,
    DoublyStochasticMatrix,
    MatchConfig,
    match_dinf,
    match_hungarian,
    match_sink_d,
    match_sink_o,
    sinkhorn_distance_plan,
    sinkhorn_operator,
)
from .errors import (
    ConfigurationError,
    DataError,
    EAlignError,
    NumericalError,
    ParseError,
    UsageError,
)
from .evalkit import EvalReport, GoldLinks, apply_threshold, evaluate
from .simmatrix import (
    EmbeddingTable,
    EntityCatalog,
    NameTable,
    SimilarityMatrix,
    col_argmax,
    cosine_similarity_matrix,
    dice_similarity_matrix,
    pad_to_square,
    row_argmax,
    tokenize_name,
)
from .stable import PreferenceOrders, is_stable, match_bmat, match_smat, preference_orders

__version__ = "0.1.0"
