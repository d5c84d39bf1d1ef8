"""Silhouette, adjusted Rand index and the silhouette-vs-k sweep."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    BadRange,
    DegenerateClustering,
    EmptyData,
    InsufficientClusters,
    LengthMismatch,
    NoFeasibleK,
)
from .kmeans import KMeansConfig, fit_kmeans
from .seeding import mix


@dataclass
class SilhouetteReport:
    per_k: list[tuple[int, float, float]]  # (k, mean silhouette, inertia)
    best_k: int
    best_score: float
    skipped: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_k": [{"k": k, "silhouette": s, "inertia": w} for k, s, w in self.per_k],
            "best_k": self.best_k,
            "best_score": self.best_score,
            "skipped": [{"k": k, "reason": r} for k, r in self.skipped],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SilhouetteReport":
        return cls(
            per_k=[(int(e["k"]), float(e["silhouette"]), float(e["inertia"])) for e in d["per_k"]],
            best_k=int(d["best_k"]),
            best_score=float(d["best_score"]),
            skipped=[(int(e["k"]), str(e["reason"])) for e in d["skipped"]],
        )


def silhouette(data, labels) -> tuple[float, np.ndarray]:
    """Mean and per-sample silhouette with Euclidean distances.

    Points in singleton clusters score 0.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    lab = np.asarray(labels)
    if len(lab) != len(x):
        raise LengthMismatch(f"{len(x)} points but {len(lab)} labels")
    uniq, codes = np.unique(lab, return_inverse=True)
    n, n_clusters = len(x), len(uniq)
    if n_clusters < 2:
        raise InsufficientClusters(f"silhouette needs at least 2 clusters, got {n_clusters}")
    if n_clusters > n - 1:
        raise DegenerateClustering(f"{n_clusters} clusters for {n} points")

    dist = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2))
    onehot = np.zeros((n, n_clusters))
    onehot[np.arange(n), codes] = 1.0
    sums = dist @ onehot  # n x L: total distance from i to each cluster
    sizes = onehot.sum(axis=0)
    own = sizes[codes]
    rows = np.arange(n)
    a = np.where(own > 1, sums[rows, codes] / np.maximum(own - 1, 1), 0.0)
    means = sums / sizes
    means[rows, codes] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where((own > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0)
    return float(s.mean()), s


def select_best(per_k: list[tuple[int, float, float]]) -> tuple[int, float]:
    """Highest score wins; equal scores go to the smaller k."""
    best_k, best_score = None, None
    for k, score, _ in sorted(per_k, key=lambda e: e[0]):
        if best_score is None or score > best_score:
            best_k, best_score = k, score
    return best_k, best_score


def sweep_k(data, k_min: int, k_max: int, base: KMeansConfig) -> SilhouetteReport:
    """Fit k-means for every k in [k_min, k_max] and score it by silhouette.

    Each k gets seed ``mix(base.seed, k)``. Values of k above n - 1 are
    recorded as skipped.
    """
    if k_min < 2 or k_min > k_max:
        raise BadRange(f"need 2 <= k_min <= k_max, got {k_min}..{k_max}")
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyData("sweep needs data")
    n = len(x)
    per_k, skipped = [], []
    for k in range(k_min, k_max + 1):
        if k > n - 1:
            skipped.append((k, f"k exceeds n-1 = {n - 1}"))
            continue
        model = fit_kmeans(x, replace(base, k=k, seed=mix(base.seed, k)))
        if len(np.unique(model.labels)) < 2:
            skipped.append((k, "fewer than 2 non-empty clusters"))
            continue
        score, _ = silhouette(x, model.labels)
        per_k.append((k, score, model.inertia))
    if not per_k:
        raise NoFeasibleK(f"no feasible k in {k_min}..{k_max} for n={n}")
    best_k, best_score = select_best(per_k)
    return SilhouetteReport(per_k, best_k, best_score, skipped)


def _comb2(v) -> int:
    return sum(int(c) * (int(c) - 1) // 2 for c in v)


def adjusted_rand_index(labels_a, labels_b) -> float:
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if len(a) != len(b):
        raise LengthMismatch(f"label vectors differ in length: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise LengthMismatch("ARI needs at least two labels")
    _, ca = np.unique(a, return_inverse=True)
    _, cb = np.unique(b, return_inverse=True)
    table = np.zeros((ca.max() + 1, cb.max() + 1), dtype=np.int64)
    np.add.at(table, (ca, cb), 1)
    index = _comb2(table.ravel())
    sum_a = _comb2(table.sum(axis=1))
    sum_b = _comb2(table.sum(axis=0))
    expected = sum_a * sum_b / (n * (n - 1) // 2)
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        same = table.shape[0] == table.shape[1] and np.count_nonzero(table) == table.shape[0]
        return 1.0 if same else 0.0
    return float((index - expected) / (max_index - expected))
