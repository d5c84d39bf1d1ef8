"""k-means++ seeding and Lloyd iterations with best-of-n restarts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyData, InvalidConfig, LabelOutOfRange, TooFewPoints
from .seeding import mix, rng_for


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 2
    max_iters: int = 300
    n_restarts: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.k < 1 or self.max_iters < 1 or self.n_restarts < 1:
            raise InvalidConfig("k, max_iters and n_restarts must all be positive")


@dataclass
class KMeansModel:
    centers: np.ndarray
    inertia: float
    iterations: int
    converged: bool
    labels: np.ndarray = field(default=None)  # training-data labels
    history: list[float] = field(default_factory=list)  # inertia after each Lloyd update


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def assign_labels(centers, points) -> np.ndarray:
    """Index of the nearest center for each point (lowest index on ties)."""
    c = np.asarray(centers, dtype=np.float64)
    p = np.asarray(points, dtype=np.float64)
    if p.size == 0:
        return np.zeros(0, dtype=np.int64)
    if c.ndim != 2 or p.ndim != 2 or c.shape[1] != p.shape[1]:
        raise DimensionMismatch(f"centers {c.shape} and points {p.shape} disagree")
    return np.argmin(_sq_dists(p, c), axis=1).astype(np.int64)


def inertia(data, labels, centers) -> float:
    """Within-cluster sum of squared distances."""
    x = np.asarray(data, dtype=np.float64)
    c = np.asarray(centers, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or c.ndim != 2 or x.shape[1] != c.shape[1] or len(lab) != len(x):
        raise DimensionMismatch(f"data {x.shape}, labels {lab.shape}, centers {c.shape}")
    if len(lab) and (lab.min() < 0 or lab.max() >= len(c)):
        raise LabelOutOfRange(f"labels must lie in [0, {len(c)})")
    return float(((x - c[lab]) ** 2).sum())


def kmeans_pp(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(data)
    chosen = [int(rng.integers(n))]
    closest = ((data - data[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        closest = np.minimum(closest, ((data - data[idx]) ** 2).sum(axis=1))
    return data[chosen].copy()


def _update_centers(data: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> np.ndarray:
    k = len(centers)
    new = centers.copy()
    empty = []
    for j in range(k):
        members = labels == j
        if members.any():
            new[j] = data[members].mean(axis=0)
        else:
            empty.append(j)
    live = [j for j in range(k) if j not in empty]
    for j in empty:
        # farthest point from its nearest live center
        d = _sq_dists(data, new[live]).min(axis=1) if live else np.zeros(len(data))
        new[j] = data[int(np.argmax(d))]
        live.append(j)
    return new


def lloyd(data: np.ndarray, centers: np.ndarray, max_iters: int) -> KMeansModel:
    labels = None
    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        new = assign_labels(centers, data)
        if labels is not None and np.array_equal(new, labels):
            converged = True
            break
        labels = new
        centers = _update_centers(data, labels, centers)
        history.append(inertia(data, labels, centers))
    final = assign_labels(centers, data)
    return KMeansModel(centers, inertia(data, final, centers), it, converged, final, history)


def fit_kmeans(data, config: KMeansConfig) -> KMeansModel:
    """Best of ``n_restarts`` k-means++ / Lloyd runs by final inertia.

    Restart ``r`` is seeded with ``mix(config.seed, r)``; ties on inertia go
    to the lowest restart index.
    """
    config.validate()
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyData("k-means needs at least one point")
    if not np.isfinite(x).all():
        raise EmptyData("data contains non-finite entries")
    if x.shape[0] < config.k:
        raise TooFewPoints(f"n={x.shape[0]} points for k={config.k}")
    best = None
    for r in range(config.n_restarts):
        rng = rng_for(mix(config.seed, r))
        model = lloyd(x, kmeans_pp(x, config.k, rng), config.max_iters)
        if best is None or model.inertia < best.inertia:
            best = model
    return best
