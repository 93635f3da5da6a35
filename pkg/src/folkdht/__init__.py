"""Collaborative-tagging simulator over a hashed key-value overlay.

The package couples an in-memory reference model of a folksonomy (tag
and resource graphs with incremental maintenance) with a simulated DHT
protocol that stores the same state in hashed blocks, an approximation
scheme bounding per-operation cost, faceted navigation, dataset tooling
and comparison metrics. See README.md for the command-line pipeline.
"""

__version__ = "0.1.0"

from .dataset import (
    AnnotationTriple,
    Dataset,
    SynthConfig,
    aggregate,
    degree_stats,
    generate_synthetic,
    load_triples,
    write_triples,
)
from .errors import (
    DecodeError,
    FolkdhtError,
    InvariantViolation,
    UnknownResourceError,
    UnknownTagError,
    ValidationError,
)
from .evolution import EvolutionConfig, EvolutionResult, run_evolution, sample_event_order
from .graphs import FolksonomyGraph, TaggingEvent, TaggingModel, TagResourceGraph
from .metrics import FgComparison, compare_fg, cosine_similarity, kendall_tau, path_stats
from .overlay import BlockType, OverlayKey, OverlayStore, Token, derive_key
from .protocol import (
    APPROXIMATED,
    EXACT,
    ProtocolClient,
    ProtocolConfig,
    SearchStepResult,
    decode_fg,
    decode_trg,
)
from .search import (
    GraphSource,
    ProtocolSource,
    SearchSession,
    StopCriteria,
    Strategy,
    is_terminal,
    refine,
    repl_navigate,
    run_scripted_search,
    start_session,
)

__all__ = [
    "__version__",
    "AnnotationTriple",
    "APPROXIMATED",
    "BlockType",
    "Dataset",
    "DecodeError",
    "EvolutionConfig",
    "EvolutionResult",
    "EXACT",
    "FgComparison",
    "FolkdhtError",
    "FolksonomyGraph",
    "GraphSource",
    "InvariantViolation",
    "OverlayKey",
    "OverlayStore",
    "ProtocolClient",
    "ProtocolConfig",
    "ProtocolSource",
    "SearchSession",
    "SearchStepResult",
    "StopCriteria",
    "Strategy",
    "SynthConfig",
    "TaggingEvent",
    "TaggingModel",
    "TagResourceGraph",
    "Token",
    "UnknownResourceError",
    "UnknownTagError",
    "ValidationError",
    "aggregate",
    "compare_fg",
    "cosine_similarity",
    "decode_fg",
    "decode_trg",
    "degree_stats",
    "derive_key",
    "generate_synthetic",
    "is_terminal",
    "kendall_tau",
    "load_triples",
    "path_stats",
    "refine",
    "repl_navigate",
    "run_evolution",
    "run_scripted_search",
    "sample_event_order",
    "start_session",
    "write_triples",
]
