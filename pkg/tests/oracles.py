"""Slow, direct reference implementations used to check the package.

Nothing here imports ``lofscan``; each function follows the textbook
definition with plain Python loops.
"""

from __future__ import annotations

import math


def sqdist(a, b) -> float:
    return sum((float(x) - float(y)) ** 2 for x, y in zip(a, b))


def knn_naive(points, k):
    """Neighbourhoods with ties: every other point within the k-distance."""
    n = len(points)
    d = [[math.sqrt(sqdist(points[i], points[j])) for j in range(n)] for i in range(n)]
    kdist, hoods = [], []
    for i in range(n):
        others = sorted(d[i][j] for j in range(n) if j != i)
        kd = others[k - 1]
        kdist.append(kd)
        hoods.append([j for j in range(n) if j != i and d[i][j] <= kd])
    return d, kdist, hoods


def lof_naive(points, k):
    """Returns ``(lof, ard, kdist, hoods)`` computed straight from the definitions."""
    d, kdist, hoods = knn_naive(points, k)
    n = len(points)
    ard = []
    for i in range(n):
        reach = [max(d[i][j], kdist[j]) for j in hoods[i]]
        ard.append(sum(reach) / len(reach))
    lof = []
    for i in range(n):
        ratios = []
        for j in hoods[i]:
            if ard[j] == 0:
                ratios.append(1.0 if ard[i] == 0 else math.inf)
            else:
                ratios.append(ard[i] / ard[j])
        lof.append(sum(ratios) / len(ratios))
    return lof, ard, kdist, hoods


def fnv1a64(data: bytes) -> int:
    h = 14695981039346656037
    for b in data:
        h = ((h ^ b) * 1099511628211) % 2**64
    return h


def mean_std(rows):
    """Per-column mean and population stddev, two passes."""
    n = len(rows)
    cols = list(zip(*rows))
    means = [math.fsum(c) / n for c in cols]
    stds = [math.sqrt(math.fsum((x - m) ** 2 for x in c) / n) for c, m in zip(cols, means)]
    return means, stds
