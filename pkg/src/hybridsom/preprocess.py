"""Per-feature MinMax scaling to [0, 1]."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyMatrix, NonFiniteValue


@dataclass
class ScalerParams:
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def n_features(self) -> int:
        return len(self.mins)


def fit_minmax(matrix) -> ScalerParams:
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyMatrix("cannot fit a scaler on an empty matrix")
    if not np.isfinite(x).all():
        raise NonFiniteValue("matrix contains non-finite entries")
    return ScalerParams(x.min(axis=0), x.max(axis=0))


def _check(x: np.ndarray, params: ScalerParams) -> None:
    if x.ndim != 2 or x.shape[1] != params.n_features:
        raise DimensionMismatch(
            f"expected {params.n_features} columns, got shape {x.shape}")


def apply_minmax(matrix, params: ScalerParams) -> np.ndarray:
    """(x - min) / (max - min) per column; constant columns map to 0.

    Values outside the fitted range extrapolate linearly.
    """
    x = np.asarray(matrix, dtype=np.float64)
    _check(x, params)
    span = params.maxs - params.mins
    flat = span == 0
    out = (x - params.mins) / np.where(flat, 1.0, span)
    out[:, flat] = 0.0
    return out


def invert_minmax(matrix, params: ScalerParams) -> np.ndarray:
    y = np.asarray(matrix, dtype=np.float64)
    _check(y, params)
    span = params.maxs - params.mins
    out = y * span + params.mins
    out[:, span == 0] = params.mins[span == 0]
    return out
