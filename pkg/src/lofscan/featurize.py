"""Entry vectorization, per-chunk normalization and sliding windows.

Each entry becomes a vector of dimension ``1 + 5 * C`` where ``C`` is the
number of distinct commands in the chunk. Component 0 is the time since the
previous entry of the same command, in milliseconds. Every command then owns
a block of five slots: slot 0 holds a numeric argument, slots 1..4 one-hot a
string argument by ``hash_slot``.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, MutableMapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from lofscan.errors import ConfigError
from lofscan.log_model import LogEntry

BLOCK = 5
N_HASH_SLOTS = 4

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


@functools.lru_cache(maxsize=1 << 16)
def hash_slot(s: str) -> int:
    """Bucket in ``0..3`` for a string argument (FNV-1a 64 of UTF-8, mod 4).

    Python's ``hash`` is salted per process, so a fixed hash is used to keep
    vectors reproducible across runs and machines.
    """
    if not s:
        raise ValueError("hash_slot needs a non-empty string")
    return fnv1a_64(s.encode("utf-8")) % N_HASH_SLOTS


@dataclass(frozen=True)
class CommandSchema:
    commands: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.commands)) != len(self.commands):
            raise ValueError("schema commands must be distinct")
        object.__setattr__(self, "index", {c: i for i, c in enumerate(self.commands)})

    @property
    def dimension(self) -> int:
        return 1 + BLOCK * len(self.commands)

    def block_offset(self, command: str) -> int:
        try:
            return 1 + BLOCK * self.index[command]
        except KeyError:
            raise KeyError(f"command {command!r} not in schema") from None


def build_schema(chunk: Iterable[LogEntry]) -> CommandSchema:
    commands = sorted({e.command for e in chunk})
    if not commands:
        raise ValueError("cannot build a schema from an empty chunk")
    return CommandSchema(tuple(commands))


@dataclass(frozen=True)
class EntryVector:
    values: np.ndarray
    entry_id: int


@dataclass(frozen=True)
class NormalizationStats:
    mean: np.ndarray
    stddev: np.ndarray


@dataclass(frozen=True)
class WindowVector:
    values: np.ndarray
    window_index: int
    entry_ids: tuple[int, ...]


def _fill(row: np.ndarray, entry: LogEntry, offset: int, last_seen: MutableMapping[str, int]) -> None:
    prev = last_seen.get(entry.command)
    row[0] = 0.0 if prev is None else (entry.timestamp - prev) * 1000.0
    last_seen[entry.command] = entry.timestamp
    if entry.numeric_arg is not None:
        row[offset] = entry.numeric_arg
    elif entry.string_arg is not None:
        row[offset + 1 + hash_slot(entry.string_arg)] = 1.0


def vectorize_entry(
    entry: LogEntry, schema: CommandSchema, last_seen: MutableMapping[str, int]
) -> EntryVector:
    """Vectorize one entry and record its timestamp in ``last_seen``.

    The first occurrence of a command in a chunk gets a time delta of 0.
    """
    offset = schema.block_offset(entry.command)
    values = np.zeros(schema.dimension)
    _fill(values, entry, offset, last_seen)
    return EntryVector(values, entry.id)


def vectorize_chunk(
    chunk: Sequence[LogEntry], schema: CommandSchema | None = None
) -> tuple[CommandSchema, np.ndarray, np.ndarray]:
    """Vectorize a whole chunk into a dense ``(n, dimension)`` matrix.

    Returns ``(schema, matrix, entry_ids)``. The time-delta state starts empty,
    so chunks are independent of each other.
    """
    if schema is None:
        schema = build_schema(chunk)
    mat = np.zeros((len(chunk), schema.dimension))
    last_seen: dict[str, int] = {}
    for i, entry in enumerate(chunk):
        _fill(mat[i], entry, schema.block_offset(entry.command), last_seen)
    ids = np.fromiter((e.id for e in chunk), dtype=np.int64, count=len(chunk))
    return schema, mat, ids


def _as_matrix(vectors: Sequence[EntryVector] | np.ndarray) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        return np.atleast_2d(vectors)
    if not vectors:
        raise ValueError("need at least one vector")
    return np.stack([v.values for v in vectors])


def compute_norm_stats(vectors: Sequence[EntryVector] | np.ndarray) -> NormalizationStats:
    """Per-component mean and population standard deviation."""
    mat = _as_matrix(vectors)
    if mat.shape[0] == 0:
        raise ValueError("need at least one vector")
    mean = mat.mean(axis=0)
    std = np.sqrt(((mat - mean) ** 2).mean(axis=0))
    return NormalizationStats(mean, std)


def normalize_matrix(mat: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    """Z-score every column; zero-variance columns map to exactly 0."""
    if mat.shape[-1] != stats.mean.shape[0]:
        raise ValueError(f"dimension mismatch: {mat.shape[-1]} vs {stats.mean.shape[0]}")
    live = stats.stddev > 0
    out = np.zeros_like(mat, dtype=np.float64)
    out[..., live] = (mat[..., live] - stats.mean[live]) / stats.stddev[live]
    return out


def normalize(v: EntryVector, stats: NormalizationStats) -> EntryVector:
    return EntryVector(normalize_matrix(v.values, stats), v.entry_id)


def window_matrix(mat: np.ndarray, w: int) -> np.ndarray:
    """Read-only ``(n - w + 1, w * d)`` view of stride-1 window concatenations.

    No data is copied: row ``i`` aliases rows ``i .. i+w-1`` of ``mat``.
    """
    if w < 1:
        raise ConfigError(f"window must be >= 1, got {w}")
    n, d = mat.shape
    if n < w:
        raise ValueError(f"{n} vectors are fewer than the window size {w}")
    flat = np.ascontiguousarray(mat).reshape(-1)
    return np.lib.stride_tricks.sliding_window_view(flat, w * d)[::d]


def window(vectors: Sequence[EntryVector], w: int) -> list[WindowVector]:
    if w < 1:
        raise ConfigError(f"window must be >= 1, got {w}")
    if len(vectors) < w:
        raise ValueError(f"{len(vectors)} vectors are fewer than the window size {w}")
    mat = _as_matrix(vectors)
    ids = [v.entry_id for v in vectors]
    views = window_matrix(mat, w)
    return [WindowVector(views[i].copy(), i, tuple(ids[i : i + w])) for i in range(len(views))]
