"""End-to-end batch detection: chunk, featurize, score, rank and report."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lofscan import featurize
from lofscan.errors import ConfigError, LofscanError
from lofscan.lof_core import LofScores, WindowedPoints, lof_scores
from lofscan.log_model import (
    CommandClassifier,
    FilterConfig,
    LogEntry,
    chunk,
    filter_entries,
    load_classes,
    parse_log,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2


@dataclass
class PipelineConfig:
    input_path: Path | None = None
    out_dir: Path | None = None
    classes_path: Path | None = None
    chunk_size: int = 100_000
    window: int = 11
    k: int = 20
    top_n: int = 5
    filter: FilterConfig = field(default_factory=FilterConfig)
    suppress_overlap: bool = False
    dump_vectors: bool = False
    lenient: bool = False
    n_jobs: int = 1

    def validate(self) -> None:
        for name in ("chunk_size", "window", "k", "top_n"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.window > self.chunk_size:
            raise ConfigError(f"window ({self.window}) exceeds chunk_size ({self.chunk_size})")
        if self.k >= self.chunk_size - self.window + 1:
            raise ConfigError(
                f"k={self.k} leaves no room: a full chunk only has "
                f"{self.chunk_size - self.window + 1} windows"
            )


@dataclass(frozen=True)
class Neighbor:
    window_index: int
    distance: float
    lof: float
    entries: tuple[LogEntry, ...]

    @property
    def entry_ids(self) -> list[int]:
        return [e.id for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "window_index": self.window_index,
            "first_entry_id": self.entries[0].id,
            "distance": _num(self.distance),
            "lof": _num(self.lof),
            "entry_ids": self.entry_ids,
            "entries": [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d: dict) -> Neighbor:
        return cls(
            window_index=d["window_index"],
            distance=_unnum(d["distance"]),
            lof=_unnum(d["lof"]),
            entries=tuple(LogEntry.from_dict(e) for e in d["entries"]),
        )


@dataclass(frozen=True)
class OutlierRecord:
    """One top-ranked window plus its k-neighbourhood as raw log sequences."""

    chunk_index: int
    rank: int
    window_index: int
    lof: float
    entries: tuple[LogEntry, ...]
    neighborhood: tuple[Neighbor, ...]

    @property
    def entry_ids(self) -> list[int]:
        return [e.id for e in self.entries]

    @property
    def first_entry_id(self) -> int:
        return self.entries[0].id

    def to_dict(self) -> dict:
        return {
            "chunk_index": self.chunk_index,
            "rank": self.rank,
            "window_index": self.window_index,
            "first_entry_id": self.first_entry_id,
            "lof": _num(self.lof),
            "entry_ids": self.entry_ids,
            "entries": [e.to_dict() for e in self.entries],
            "neighborhood": [nb.to_dict() for nb in self.neighborhood],
        }

    @classmethod
    def from_dict(cls, d: dict) -> OutlierRecord:
        return cls(
            chunk_index=d["chunk_index"],
            rank=d["rank"],
            window_index=d["window_index"],
            lof=_unnum(d["lof"]),
            entries=tuple(LogEntry.from_dict(e) for e in d["entries"]),
            neighborhood=tuple(Neighbor.from_dict(nb) for nb in d["neighborhood"]),
        )


def _num(x: float) -> float | str:
    # strict JSON has no infinity literal
    return "Infinity" if math.isinf(x) else float(x)


def _unnum(x) -> float:
    return float(x)


@dataclass
class ChunkResult:
    chunk_index: int
    entries: list[LogEntry]
    schema: featurize.CommandSchema
    scores: LofScores
    records: list[OutlierRecord]
    normed: np.ndarray | None = None

    @property
    def window_first_ids(self) -> np.ndarray:
        n_win = self.scores.lof.shape[0]
        return np.fromiter((self.entries[i].id for i in range(n_win)), dtype=np.int64, count=n_win)


@dataclass
class RunSummary:
    processed: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)
    failed: dict[int, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_PARTIAL if self.failed else EXIT_OK


# ---------------------------------------------------------------------------
# ranking


def select_top(lof: np.ndarray, n: int, w: int = 1, suppress_overlap: bool = False) -> list[int]:
    """Indices of the ``n`` highest scores, ties to the lower index.

    With ``suppress_overlap`` a window sharing any entry with an already
    selected one (index distance < ``w``) is skipped.
    """
    order = np.lexsort((np.arange(lof.shape[0]), -lof))
    if not suppress_overlap:
        return [int(i) for i in order[:n]]
    picked: list[int] = []
    for i in order:
        if all(abs(int(i) - j) >= w for j in picked):
            picked.append(int(i))
            if len(picked) == n:
                break
    return picked


def score_chunk(entries: list[LogEntry], window: int, k: int, n_jobs: int = 1):
    """Vectorize, normalize and LOF-score an already filtered chunk."""
    schema, raw, _ = featurize.vectorize_chunk(entries)
    stats = featurize.compute_norm_stats(raw)
    normed = featurize.normalize_matrix(raw, stats)
    scores = lof_scores(WindowedPoints(normed, window), k, n_jobs=n_jobs)
    return schema, normed, scores


def process_chunk(raw_chunk: list[LogEntry], chunk_index: int, cfg: PipelineConfig, classes) -> ChunkResult | None:
    entries = filter_entries(raw_chunk, cfg.filter, classes)
    n_windows = len(entries) - cfg.window + 1
    if n_windows < 1:
        logger.warning(
            "chunk %d: %d entries after filtering, fewer than the window %d; skipped",
            chunk_index, len(entries), cfg.window,
        )
        return None
    if n_windows <= cfg.k:
        logger.warning("chunk %d: only %d windows for k=%d; skipped", chunk_index, n_windows, cfg.k)
        return None

    schema, normed, scores = score_chunk(entries, cfg.window, cfg.k, cfg.n_jobs)
    logger.info(
        "chunk %d: %d entries, %d commands, entry dim %d, window dim %d",
        chunk_index, len(entries), len(schema.commands), schema.dimension, cfg.window * schema.dimension,
    )
    w = cfg.window
    table = scores.table
    records = []
    for rank, wi in enumerate(select_top(scores.lof, cfg.top_n, w, cfg.suppress_overlap), start=1):
        nbs = tuple(
            Neighbor(int(j), float(dist), float(scores.lof[j]), tuple(entries[j : j + w]))
            for j, dist in zip(table.neighbors(wi), table.neighbor_distances(wi))
        )
        records.append(
            OutlierRecord(chunk_index, rank, wi, float(scores.lof[wi]), tuple(entries[wi : wi + w]), nbs)
        )
    return ChunkResult(chunk_index, entries, schema, scores, records, normed)


# ---------------------------------------------------------------------------
# outputs


def emit_timeseries(path: Path, first_ids, lof) -> None:
    """Two-column CSV ``window_first_entry_id,lof``."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("window_first_entry_id,lof\n")
        for i, v in zip(first_ids, lof):
            fh.write(f"{int(i)},{'inf' if math.isinf(v) else repr(float(v))}\n")


def render_text(records: list[OutlierRecord]) -> str:
    """Side-by-side view of each outlier and its nearest neighbour window."""
    out: list[str] = []
    for rec in records:
        out.append(
            f"chunk {rec.chunk_index}  outlier #{rec.rank}  window {rec.window_index}  "
            f"entries {rec.entries[0].id}-{rec.entries[-1].id}  LOF {_fmt(rec.lof)}"
        )
        left = [e.line for e in rec.entries]
        if rec.neighborhood:
            nb = rec.neighborhood[0]
            out.append(
                f"  nearest of {len(rec.neighborhood)} neighbours: window {nb.window_index}  "
                f"distance {nb.distance:.4f}  LOF {_fmt(nb.lof)}"
            )
            right = [e.line for e in nb.entries]
        else:
            right = []
        width = max(len(s) for s in left)
        out.append(f"  {'outlier'.ljust(width)}  |  neighbour")
        for i in range(max(len(left), len(right))):
            a = left[i] if i < len(left) else ""
            b = right[i] if i < len(right) else ""
            out.append(f"  {a.ljust(width)}  |  {b}".rstrip())
        out.append("")
    return "\n".join(out)


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.6f}"


def report_json(records: list[OutlierRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2, ensure_ascii=False) + "\n"


def emit_report(records: list[OutlierRecord], json_path: Path, txt_path: Path) -> None:
    Path(json_path).write_text(report_json(records), encoding="utf-8")
    Path(txt_path).write_text(render_text(records), encoding="utf-8")


def load_report(path: Path) -> list[OutlierRecord]:
    return [OutlierRecord.from_dict(d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]


def dump_vectors(out_dir: Path, result: ChunkResult, window: int) -> None:
    i = result.chunk_index
    ids = np.fromiter((e.id for e in result.entries), dtype=np.int64)
    normed = result.normed
    with open(out_dir / f"chunk_{i}_entry_vectors.csv", "w", encoding="utf-8") as fh:
        for eid, row in zip(ids, normed):
            fh.write(f"{eid}," + ",".join(repr(float(v)) for v in row) + "\n")
    views = featurize.window_matrix(normed, window)
    with open(out_dir / f"chunk_{i}_window_vectors.csv", "w", encoding="utf-8") as fh:
        for eid, row in zip(ids, views):
            fh.write(f"{eid}," + ",".join(repr(float(v)) for v in row) + "\n")


def write_chunk_outputs(out_dir: Path, result: ChunkResult, cfg: PipelineConfig) -> None:
    i = result.chunk_index
    emit_timeseries(out_dir / f"chunk_{i}_timeseries.csv", result.window_first_ids, result.scores.lof)
    emit_report(result.records, out_dir / f"chunk_{i}_outliers.json", out_dir / f"chunk_{i}_outliers.txt")
    if cfg.dump_vectors:
        dump_vectors(out_dir, result, cfg.window)


def run(cfg: PipelineConfig, entries: list[LogEntry] | None = None) -> RunSummary:
    """Run every chunk and write its reports to ``cfg.out_dir``.

    Configuration and parse errors raise; a failure inside one chunk is logged
    and recorded in the summary while the remaining chunks proceed.
    """
    cfg.validate()
    if cfg.out_dir is None:
        raise ConfigError("an output directory is required")
    if entries is None:
        if cfg.input_path is None:
            raise ConfigError("an input log is required")
        entries = parse_log(Path(cfg.input_path), lenient=cfg.lenient)
    if cfg.classes_path is not None:
        classes = load_classes(cfg.classes_path)
    else:
        logger.warning("no command classification given; class-based exclusion disabled")
        classes = CommandClassifier()
        cfg = _replace_filter(cfg, FilterConfig(frozenset(), cfg.filter.excluded_command_patterns))
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    chunks = chunk(entries, cfg.chunk_size)
    summary = RunSummary()
    parallel_chunks = cfg.n_jobs > 1 and len(chunks) > 1
    inner = PipelineConfig(**{**cfg.__dict__, "n_jobs": 1}) if parallel_chunks else cfg

    def work(item):
        idx, raw = item
        try:
            res = process_chunk(raw, idx, inner, classes)
            if res is not None:
                write_chunk_outputs(out_dir, res, inner)
            return idx, res, None
        except (LofscanError, ValueError, KeyError, MemoryError) as exc:
            logger.error("chunk %d failed: %s", idx, exc)
            return idx, None, str(exc)

    items = list(enumerate(chunks))
    if parallel_chunks:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as ex:
            outcomes = list(ex.map(work, items))
    else:
        outcomes = [work(it) for it in items]

    for idx, res, err in outcomes:
        if err is not None:
            summary.failed[idx] = err
        elif res is None:
            summary.skipped.append(idx)
        else:
            summary.processed.append(idx)
    return summary


def _replace_filter(cfg: PipelineConfig, flt: FilterConfig) -> PipelineConfig:
    return PipelineConfig(**{**cfg.__dict__, "filter": flt})
