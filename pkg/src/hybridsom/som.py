"""Online rectangular self-organizing map.

Training follows the classic sequential Kohonen rule with Gaussian
neighbourhood and geometric decay of both learning rate and radius::

    t     = step / total_steps
    alpha = lr_start    * (lr_end    / lr_start)    ** t
    sigma = sigma_start * (sigma_end / sigma_start) ** t
    w_k  += alpha * exp(-|g_k - g_b|^2 / (2 sigma^2)) * (x - w_k)

Each node that wins at least one training row after training is one
cluster; its codebook vector is that cluster's center.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AllNodesEmpty, DimensionMismatch, EmptyData, InvalidConfig
from .seeding import rng_for

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SomConfig:
    grid_rows: int = 1
    grid_cols: int = 1
    epochs: int = 200
    lr_start: float = 0.5
    lr_end: float = 0.01
    sigma_start: float | None = None  # None -> max(grid_rows, grid_cols) / 2
    sigma_end: float = 0.5
    seed: int = 0

    @property
    def n_nodes(self) -> int:
        return self.grid_rows * self.grid_cols

    def resolved(self) -> "SomConfig":
        """Copy with ``sigma_start`` filled in; validates every field."""
        cfg = self
        if cfg.sigma_start is None:
            cfg = replace(cfg, sigma_start=max(cfg.grid_rows, cfg.grid_cols) / 2.0)
        if cfg.grid_rows < 1 or cfg.grid_cols < 1:
            raise InvalidConfig("grid dimensions must be positive")
        if cfg.epochs < 1:
            raise InvalidConfig("epochs must be positive")
        if not 0 < cfg.lr_end <= cfg.lr_start <= 1:
            raise InvalidConfig("need 0 < lr_end <= lr_start <= 1")
        if not 0 < cfg.sigma_end <= cfg.sigma_start:
            raise InvalidConfig("need 0 < sigma_end <= sigma_start")
        return cfg


@dataclass
class SomModel:
    config: SomConfig
    codebook: np.ndarray  # (rows*cols) x D, node = row*cols + col
    activations: np.ndarray = field(default=None)  # BMU hit counts

    @property
    def grid_coords(self) -> np.ndarray:
        r, c = np.divmod(np.arange(self.config.n_nodes), self.config.grid_cols)
        return np.column_stack([r, c])


@dataclass
class CenterSet:
    centers: np.ndarray
    source_nodes: list[int]
    activation: list[int]
    month: object
    warning: str | None = None


def _check_data(data) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyData("SOM needs at least one training row")
    if not np.isfinite(x).all():
        raise EmptyData("training data contains non-finite entries")
    return x


def _bmu(codebook: np.ndarray, x: np.ndarray) -> int:
    d2 = ((codebook - x) ** 2).sum(axis=1)
    return int(np.argmin(d2))  # first minimum -> lowest index on ties


def train_som(data, config: SomConfig) -> SomModel:
    """Train a SOM on ``data`` (rows in [0, 1]).

    The codebook starts as ``n_nodes`` rows drawn with replacement from
    ``data``; every epoch visits the rows in a fresh seeded permutation.
    """
    x = _check_data(data)
    cfg = config.resolved()
    n = x.shape[0]
    rng = rng_for(cfg.seed)
    codebook = x[rng.integers(0, n, size=cfg.n_nodes)].copy()

    coords = SomModel(cfg, codebook).grid_coords.astype(np.float64)
    grid_d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)
    lr_ratio = cfg.lr_end / cfg.lr_start
    sigma_ratio = cfg.sigma_end / cfg.sigma_start
    total = cfg.epochs * n
    step = 0
    for _ in range(cfg.epochs):
        for i in rng.permutation(n):
            xi = x[i]
            b = _bmu(codebook, xi)
            t = step / total
            alpha = cfg.lr_start * lr_ratio ** t
            sigma = cfg.sigma_start * sigma_ratio ** t
            two_s2 = 2.0 * sigma * sigma
            # math.exp per node keeps the update reproducible against scalar replays
            h = np.array([math.exp(-g / two_s2) for g in grid_d2[b]])
            codebook += (alpha * h)[:, None] * (xi - codebook)
            step += 1

    model = SomModel(cfg, codebook)
    model.activations = activation_counts(model, x)
    return model


def best_matching_unit(model: SomModel, x) -> int:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (model.codebook.shape[1],):
        raise DimensionMismatch(
            f"expected vector of length {model.codebook.shape[1]}, got shape {v.shape}")
    return _bmu(model.codebook, v)


def _bmus(model: SomModel, x: np.ndarray) -> np.ndarray:
    if x.shape[1] != model.codebook.shape[1]:
        raise DimensionMismatch(
            f"expected {model.codebook.shape[1]} columns, got {x.shape[1]}")
    d2 = ((x[:, None, :] - model.codebook[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1), d2


def activation_counts(model: SomModel, data) -> np.ndarray:
    x = _check_data(data)
    bmus, _ = _bmus(model, x)
    return np.bincount(bmus, minlength=model.config.n_nodes).astype(np.int64)


def quantization_error(model: SomModel, data) -> float:
    """Mean Euclidean distance from each row to its BMU."""
    x = _check_data(data)
    bmus, d2 = _bmus(model, x)
    return float(np.sqrt(d2[np.arange(len(x)), bmus]).mean())


def extract_centers(model: SomModel, month=None) -> CenterSet:
    """Codebook rows of every node that won at least one training row."""
    if model.activations is None:
        raise AllNodesEmpty("model has no activation counts; train it first")
    hit = np.flatnonzero(model.activations > 0)
    if len(hit) == 0:
        raise AllNodesEmpty("no node was activated")
    n_empty = model.config.n_nodes - len(hit)
    warning = None
    if n_empty:
        warning = f"{n_empty} empty node" + ("s" if n_empty > 1 else "")
        if month is not None:
            warning = f"{month}: {warning}"
        log.info(warning)
    return CenterSet(
        centers=model.codebook[hit].copy(),
        source_nodes=[int(i) for i in hit],
        activation=[int(model.activations[i]) for i in hit],
        month=month,
        warning=warning,
    )
