"""PCA on the sample covariance, diagonalised by cyclic Jacobi rotations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadComponentCount, DimensionMismatch, NonFiniteValue, TooFewRows

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # q x D, orthonormal rows
    eigenvalues: np.ndarray  # q, descending
    total_variance: float
    all_eigenvalues: np.ndarray  # D, descending, before truncation

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance


def jacobi_eigh(sym, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps stop once the off-diagonal Frobenius norm drops to
    ``tol * ||A||_F``. Returns ``(eigenvalues, vectors)`` with eigenvectors in
    the columns of ``vectors``, unsorted.
    """
    a = np.array(sym, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    norm = math.sqrt(float((a * a).sum()))
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float((a[off_mask] ** 2).sum()))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def fit_pca(matrix, q: int) -> PcaModel:
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise TooFewRows("PCA needs at least two rows")
    m, d = x.shape
    if not 1 <= q <= min(m, d):
        raise BadComponentCount(f"q must be in 1..{min(m, d)}, got {q}")
    if not np.isfinite(x).all():
        raise NonFiniteValue("matrix contains non-finite entries")

    # identical rows: take the row itself so centring is exact
    mean = x[0].copy() if (x == x[0]).all() else x.mean(axis=0)
    xc = x - mean
    cov = xc.T @ xc / (m - 1)
    cov = 0.5 * (cov + cov.T)
    total = float(np.trace(cov))

    evals, vecs = jacobi_eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals, vecs = evals[order], vecs[:, order]
    if abs(evals.sum() - total) > 1e-9 * max(1.0, abs(total)):
        raise ArithmeticError("eigenvalue sum does not match covariance trace")

    comps = vecs.T.copy()
    for row in comps:
        if row[int(np.argmax(np.abs(row)))] < 0:
            row *= -1.0
    evals = np.maximum(evals, 0.0)
    return PcaModel(mean, comps[:q], evals[:q], total, evals)


def project(model: PcaModel, matrix) -> np.ndarray:
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != len(model.mean):
        raise DimensionMismatch(f"expected {len(model.mean)} columns, got shape {x.shape}")
    return (x - model.mean) @ model.components.T


def reconstruct(model: PcaModel, scores) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.shape[1] != model.n_components:
        raise DimensionMismatch(
            f"expected {model.n_components} columns, got shape {s.shape}")
    return s @ model.components + model.mean
