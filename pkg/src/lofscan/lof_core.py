"""Local Outlier Factor with exact, tie-aware k-nearest-neighbour search.

Neighbour search is brute force. Each block of query rows gets a GEMM-based
squared-distance estimate against all points, a rigorous rounding-error bound
turns that into a small candidate set, and candidates are re-measured
directly in float64. Final neighbourhoods therefore do not depend on BLAS
blocking or thread count, and ties at the k-distance are detected exactly.

For sliding-window data (:class:`WindowedPoints`) the window Gram matrix is
assembled from shifted entry-level Gram matrices, so the inner dimension of
the GEMM is the entry dimension rather than ``w`` times it.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from lofscan.errors import ConfigError, InputError

logger = logging.getLogger(__name__)

# Bytes budget for one block's (rows x n) scratch arrays.
DEFAULT_BLOCK_BYTES = 256 * 1024 * 1024


class DensePoints:
    """Plain ``(n, d)`` point matrix. float32 storage is accepted."""

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError(f"points must be a non-empty 2-D array, got shape {pts.shape}")
        if pts.dtype not in (np.float32, np.float64):
            pts = pts.astype(np.float64)
        if not np.isfinite(pts).all():
            raise InputError("points contain NaN or infinite coordinates")
        self.data = np.ascontiguousarray(pts)
        self.n, self.dim = self.data.shape
        self.dtype = self.data.dtype
        self._sq = np.einsum("ij,ij->i", self.data, self.data)

    def sqnorms(self) -> np.ndarray:
        return self._sq

    def gram(self, start: int, stop: int) -> np.ndarray:
        return self.data[start:stop] @ self.data.T

    def rows(self, idx) -> np.ndarray:
        return np.asarray(self.data[idx], dtype=np.float64)

    def row(self, i: int) -> np.ndarray:
        return np.asarray(self.data[i], dtype=np.float64)


class WindowedPoints:
    """Stride-1 windows of ``w`` consecutive rows of an entry matrix.

    Window ``i`` is the concatenation of ``entries[i:i+w]``; nothing of size
    ``n * w * d`` is ever materialized.
    """

    def __init__(self, entries: np.ndarray, w: int):
        e = np.ascontiguousarray(entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[1] == 0:
            raise InputError(f"entries must be a 2-D array, got shape {e.shape}")
        if w < 1:
            raise ConfigError(f"window must be >= 1, got {w}")
        if e.shape[0] < w:
            raise InputError(f"{e.shape[0]} entries are fewer than the window size {w}")
        if not np.isfinite(e).all():
            raise InputError("entries contain NaN or infinite values")
        self.entries = e
        self.w = w
        self.n = e.shape[0] - w + 1
        self.entry_dim = e.shape[1]
        self.dim = w * e.shape[1]
        self.dtype = np.dtype(np.float64)
        self.data = np.lib.stride_tricks.sliding_window_view(e.reshape(-1), self.dim)[:: self.entry_dim]
        esq = np.einsum("ij,ij->i", e, e)
        sq = np.zeros(self.n)
        for t in range(w):
            sq += esq[t : t + self.n]
        self._sq = sq

    def sqnorms(self) -> np.ndarray:
        return self._sq

    def gram(self, start: int, stop: int) -> np.ndarray:
        w, n = self.w, self.n
        g = self.entries[start : stop + w - 1] @ self.entries.T
        out = g[0 : stop - start, 0:n].copy()
        for t in range(1, w):
            out += g[t : t + stop - start, t : t + n]
        return out

    def rows(self, idx) -> np.ndarray:
        return self.data[idx]

    def row(self, i: int) -> np.ndarray:
        return np.array(self.data[i])


def as_points(points) -> DensePoints | WindowedPoints:
    if isinstance(points, (DensePoints, WindowedPoints)):
        return points
    return DensePoints(points)


@dataclass(frozen=True)
class NeighborhoodTable:
    """Ragged k-neighbourhoods in CSR layout.

    Neighbours of point ``i`` are ``indices[indptr[i]:indptr[i+1]]`` ordered by
    distance then index; there may be more than ``k`` on ties.
    """

    k: int
    k_distance: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    distances: np.ndarray

    @property
    def n(self) -> int:
        return self.k_distance.shape[0]

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def neighbor_distances(self, i: int) -> np.ndarray:
        return self.distances[self.indptr[i] : self.indptr[i + 1]]


@dataclass(frozen=True)
class LofScores:
    ar: np.ndarray
    lof: np.ndarray
    table: NeighborhoodTable


def _error_coefficient(dim: int, dtype) -> float:
    # |approx - true| <= coef * (|x|^2 + |y|^2) for the GEMM-based estimate.
    eps = float(np.finfo(dtype).eps)
    return 1.05 * (2 * dim + 16) * eps


def _knn_block(pts, start: int, stop: int, k: int, sq: np.ndarray, coef: float):
    g = pts.gram(start, stop)
    sq_q = sq[start:stop].astype(g.dtype, copy=False)
    sq_all = sq.astype(g.dtype, copy=False)
    # g becomes the approximate squared distance matrix, in place
    g *= -2.0
    g += sq_q[:, None]
    g += sq_all[None, :]
    rows = np.arange(stop - start)
    g[rows, rows + start] = np.inf

    slack_all = coef * sq_all
    slack_q = coef * sq_q
    upper = g + slack_all[None, :]
    upper += slack_q[:, None]
    bound = np.partition(upper, k - 1, axis=1)[:, k - 1]
    # lower bound on the true distance, reusing the buffer
    np.subtract(g, slack_all[None, :], out=upper)
    upper -= slack_q[:, None]
    cand_mask = upper <= bound[:, None]
    del g, upper

    out_idx, out_dist, kdist = [], [], np.empty(stop - start)
    for r in range(stop - start):
        i = start + r
        cand = np.flatnonzero(cand_mask[r])
        cand = cand[cand != i]
        diff = pts.rows(cand) - pts.row(i)
        # plain pairwise reduction: its order does not depend on row alignment
        np.square(diff, out=diff)
        d2 = diff.sum(axis=1)
        order = np.lexsort((cand, d2))
        d2 = d2[order]
        cand = cand[order]
        kth = d2[k - 1]
        m = int(np.searchsorted(d2, kth, side="right"))
        kdist[r] = math.sqrt(kth)
        out_idx.append(cand[:m])
        out_dist.append(np.sqrt(d2[:m]))
    return kdist, out_idx, out_dist


def _block_rows(n: int, block_bytes: int) -> int:
    per_row = 4 * n * 8
    return max(1, min(n, block_bytes // per_row))


def knn(points, k: int, *, n_jobs: int = 1, block_bytes: int = DEFAULT_BLOCK_BYTES) -> NeighborhoodTable:
    """Exact k-nearest neighbours under the Euclidean metric.

    Args:
        points: ``(n, d)`` array, :class:`DensePoints` or :class:`WindowedPoints`.
        k: neighbourhood size, ``1 <= k < n``.
        n_jobs: worker threads over query blocks; ``-1`` means all cores.
            Output is identical for every value.
        block_bytes: scratch memory budget per block.

    A point is never its own neighbour, but exact duplicates of it are.
    All points tied at the k-distance are included.
    """
    pts = as_points(points)
    n = pts.n
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if k >= n:
        raise ConfigError(f"k={k} must be smaller than the number of points ({n})")
    sq = pts.sqnorms()
    coef = _error_coefficient(pts.dim, pts.dtype)
    b = _block_rows(n, block_bytes)
    starts = list(range(0, n, b))

    def work(s):
        return _knn_block(pts, s, min(s + b, n), k, sq, coef)

    if n_jobs == -1:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            parts = list(ex.map(work, starts))
    else:
        parts = [work(s) for s in starts]

    kdist = np.concatenate([p[0] for p in parts])
    idx_lists = [a for p in parts for a in p[1]]
    dist_lists = [a for p in parts for a in p[2]]
    counts = np.fromiter((len(a) for a in idx_lists), dtype=np.int64, count=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return NeighborhoodTable(
        k=k,
        k_distance=kdist,
        indptr=indptr,
        indices=np.concatenate(idx_lists).astype(np.int64),
        distances=np.concatenate(dist_lists),
    )


def distance(points, x: int, y: int) -> float:
    pts = as_points(points)
    diff = pts.row(x) - pts.row(y)
    return math.sqrt(float(np.square(diff).sum()))


def reachability(x: int, y: int, table: NeighborhoodTable, points) -> float:
    """``max(d(x, y), k_distance(y))``."""
    nb = table.neighbors(x)
    hit = np.flatnonzero(nb == y)
    d = float(table.neighbor_distances(x)[hit[0]]) if hit.size else distance(points, x, y)
    return max(d, float(table.k_distance[y]))


def avg_reachability(x: int, table: NeighborhoodTable, points=None) -> float:
    """Mean reachability distance from ``x`` over its whole neighbourhood.

    The divisor is the neighbourhood size, which exceeds k on ties.
    """
    nb = table.neighbors(x)
    reach = np.maximum(table.neighbor_distances(x), table.k_distance[nb])
    return float(reach.sum() / nb.size)


def _segment_mean(values: np.ndarray, table: NeighborhoodTable) -> np.ndarray:
    return np.add.reduceat(values, table.indptr[:-1]) / table.counts


def lof_from_table(table: NeighborhoodTable) -> LofScores:
    reach = np.maximum(table.distances, table.k_distance[table.indices])
    ar = _segment_mean(reach, table)

    num = np.repeat(ar, table.counts)
    den = ar[table.indices]
    ratio = np.empty_like(num)
    zero_den = den == 0
    ok = ~zero_den
    ratio[ok] = num[ok] / den[ok]
    # duplicates: 0/0 counts as an equal density, x/0 as infinitely sparser
    ratio[zero_den & (num == 0)] = 1.0
    ratio[zero_den & (num > 0)] = np.inf
    lof = _segment_mean(ratio, table)
    return LofScores(ar=ar, lof=lof, table=table)


def lof_scores(points, k: int, *, n_jobs: int = 1, block_bytes: int = DEFAULT_BLOCK_BYTES) -> LofScores:
    """LOF score for every point. Infinite scores flag maximal outliers."""
    table = knn(points, k, n_jobs=n_jobs, block_bytes=block_bytes)
    return lof_from_table(table)
