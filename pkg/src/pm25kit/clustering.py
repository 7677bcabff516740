"""One-dimensional K-means (Lloyd) with elbow/knee selection and labels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PM25Error

POLLUTION_LABELS = ("Low", "Moderate", "High")
N_RESTARTS = 10
MAX_ITER = 300


@dataclass(frozen=True)
class ClusterModel:
    k: int
    centers: tuple[float, ...]          # space the points were given in
    raw_centers: tuple[float, ...]      # back-transformed, ug/m3
    assignments: dict[str, int]
    wcss: float
    labels: dict[int, str] | None = None
    restart: int = 0
    n_iter: int = 0
    wcss_trace: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def label_of(self, country: str) -> str | None:
        if self.labels is None:
            return None
        return self.labels[self.assignments[country]]


@dataclass(frozen=True)
class ElbowCurve:
    wcss: dict[int, float]
    knee: int
    models: dict[int, ClusterModel] = field(compare=False, repr=False, default_factory=dict)


def _assign(values: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum, so ties go to the lower index
    return np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)


def _wcss(values: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    return float(np.sum((values - centers[labels]) ** 2))


def _update(values: np.ndarray, labels: np.ndarray, centers: np.ndarray, k: int) -> np.ndarray:
    """Recompute means, repairing empty clusters in place on ``labels``.

    An empty cluster takes over the point farthest from its current center,
    drawn only from clusters that keep at least one other member.
    """
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        dist = np.abs(values - centers[labels])
        dist[counts[labels] < 2] = -1.0
        i = int(np.argmax(dist))
        labels[i] = j
    sums = np.bincount(labels, weights=values, minlength=k)
    counts = np.bincount(labels, minlength=k)
    return sums / counts


def _lloyd(values: np.ndarray, init: np.ndarray, k: int, max_iter: int):
    centers = init.astype(float).copy()
    labels = _assign(values, centers)
    trace = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        centers = _update(values, labels, centers, k)
        trace.append(_wcss(values, labels, centers))
        new = _assign(values, centers)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels, centers, trace, n_iter


def _quantile_init(values: np.ndarray, k: int) -> np.ndarray:
    return np.quantile(values, [(i + 0.5) / k for i in range(k)])


def _spread_init(values: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    # k-means++ style: each new seed drawn with probability ~ squared distance
    idx = [int(rng.integers(values.size))]
    for _ in range(1, k):
        d2 = np.min((values[:, None] - values[idx][None, :]) ** 2, axis=1)
        total = d2.sum()
        idx.append(int(rng.choice(values.size, p=d2 / total)) if total > 0 else int(rng.integers(values.size)))
    return values[idx]


def kmeans_fit(points: Sequence[tuple[str, float]], k: int, seed: int = 0,
               loc: float = 0.0, scale: float = 1.0,
               n_init: int = N_RESTARTS, max_iter: int = MAX_ITER) -> ClusterModel:
    """Best-of-restarts Lloyd's algorithm on scalar values.

    Restart 0 starts from the (i+0.5)/k quantiles; the others pick k
    data points with a generator seeded by ``seed``, each new point drawn
    with probability proportional to its squared distance from the points
    already chosen. The winner is the
    lowest (WCSS, restart index). ``loc``/``scale`` map centers back to raw
    units as ``loc + scale * center`` (pass the standardization moments).
    """
    if not points:
        raise PM25Error("kmeans_fit: empty input")
    if k < 1 or k > len(points):
        raise PM25Error(f"kmeans_fit: need 1 <= k <= {len(points)}, got k={k}")
    ids = [str(p[0]) for p in points]
    if len(set(ids)) != len(ids):
        raise PM25Error("kmeans_fit: point ids must be unique")
    values = np.array([float(p[1]) for p in points])

    rng = np.random.default_rng(seed)
    best = None
    for r in range(max(1, n_init)):
        init = _quantile_init(values, k) if r == 0 else _spread_init(values, k, rng)
        labels, centers, trace, n_iter = _lloyd(values, np.sort(init), k, max_iter)
        w = _wcss(values, labels, centers)
        if best is None or w < best[0]:
            best = (w, r, labels, centers, trace, n_iter)

    w, r, labels, centers, trace, n_iter = best
    # empty-cluster repair can leave centers out of order; number clusters by ascending center
    order = np.argsort(centers, kind="stable")
    rank = np.empty(k, dtype=int)
    rank[order] = np.arange(k)
    labels, centers = rank[labels], centers[order]
    return ClusterModel(
        k=k,
        centers=tuple(centers.tolist()),
        raw_centers=tuple((loc + scale * centers).tolist()),
        assignments={cid: int(lab) for cid, lab in zip(ids, labels)},
        wcss=w,
        restart=r,
        n_iter=n_iter,
        wcss_trace=tuple(trace),
    )


def knee_point(curve: dict[int, float]) -> int:
    """k whose (k, WCSS) point lies farthest from the first-last chord."""
    ks = sorted(curve)
    x0, y0, x1, y1 = ks[0], curve[ks[0]], ks[-1], curve[ks[-1]]
    norm = math.hypot(x1 - x0, y1 - y0)
    best_k, best_d = ks[0], -1.0
    for k in ks:
        d = abs((y1 - y0) * k - (x1 - x0) * curve[k] + x1 * y0 - y1 * x0) / norm if norm else 0.0
        if d > best_d:
            best_k, best_d = k, d
    return best_k


def elbow_curve(points: Sequence[tuple[str, float]], k_max: int = 8, seed: int = 0,
                loc: float = 0.0, scale: float = 1.0) -> ElbowCurve:
    if k_max < 2:
        raise PM25Error("elbow_curve: k_max must be >= 2")
    if k_max > len(points):
        raise PM25Error(f"elbow_curve: k_max={k_max} exceeds {len(points)} points")
    models = {k: kmeans_fit(points, k, seed, loc, scale) for k in range(1, k_max + 1)}
    wcss = {k: m.wcss for k, m in models.items()}
    return ElbowCurve(wcss=wcss, knee=knee_point(wcss), models=models)


def label_clusters(model: ClusterModel) -> ClusterModel:
    """Attach Low/Moderate/High by ascending raw-space center (k=3 only)."""
    if model.k != 3:
        raise PM25Error(f"label_clusters needs k=3, got k={model.k}")
    order = sorted(range(3), key=lambda j: (model.raw_centers[j], j))
    labels = {j: POLLUTION_LABELS[rank] for rank, j in enumerate(order)}
    return ClusterModel(model.k, model.centers, model.raw_centers, dict(model.assignments), model.wcss,
                        labels, model.restart, model.n_iter, model.wcss_trace)
