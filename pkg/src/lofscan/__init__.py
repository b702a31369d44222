"""Windowed Local Outlier Factor anomaly detection for CPS event logs."""

from lofscan.errors import ConfigError, InputError, LofscanError, LogFormatError
from lofscan.featurize import (
    CommandSchema,
    NormalizationStats,
    WindowVector,
    build_schema,
    compute_norm_stats,
    hash_slot,
    normalize,
    vectorize_chunk,
    vectorize_entry,
    window,
)
from lofscan.lof_core import LofScores, NeighborhoodTable, knn, lof_scores
from lofscan.log_model import (
    CommandClass,
    FilterConfig,
    LogEntry,
    chunk,
    filter_entries,
    load_classes,
    parse_log,
)

__version__ = "0.1.0"

__all__ = [
    "CommandClass",
    "CommandSchema",
    "ConfigError",
    "FilterConfig",
    "InputError",
    "LofScores",
    "LofscanError",
    "LogEntry",
    "LogFormatError",
    "NeighborhoodTable",
    "NormalizationStats",
    "WindowVector",
    "build_schema",
    "chunk",
    "compute_norm_stats",
    "filter_entries",
    "hash_slot",
    "knn",
    "load_classes",
    "lof_scores",
    "normalize",
    "parse_log",
    "vectorize_chunk",
    "vectorize_entry",
    "window",
]
