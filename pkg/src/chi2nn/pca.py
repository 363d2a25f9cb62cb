"""Principal component analysis on a cyclic Jacobi eigensolver.

Three feature scalings are supported before the eigendecomposition:

* ``covariance`` - raw features, sample covariance matrix (the default);
* ``correlation`` - features divided by their sample standard deviation;
* ``range`` - features scaled to [0, 1] by their observed min/max.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VARIANTS = ("covariance", "correlation", "range")


@dataclass(frozen=True)
class PcaModel:
    """Fitted principal axes of one feature matrix.

    ``axes`` holds one principal axis per column, in nonincreasing eigenvalue
    order; ``contribution`` holds each axis' share of total variance. ``scale``
    is the per-feature divisor applied after centering (None for the raw
    covariance variant). A model is ``degenerate`` when the input had no
    variance at all.
    """

    mean: np.ndarray
    scale: np.ndarray | None
    axes: np.ndarray
    eigenvalues: np.ndarray
    contribution: np.ndarray
    variant: str
    degenerate: bool = False

    @property
    def dims(self) -> int:
        return self.axes.shape[0]


def jacobi_eigh(matrix, rel_tol=1e-12, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops to ``rel_tol``
    relative to the input's Frobenius norm (an absolute 1e-12 target is not
    representable in float64 once matrix entries reach ~1e4). Returns
    (eigenvalues, eigenvectors-as-columns), unsorted.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=1e-10 * max(1.0, float(np.abs(a).max(initial=0.0)))):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    vectors = np.eye(n)
    if n == 1:
        return np.array([a[0, 0]]), vectors

    threshold = rel_tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                rot = np.array([[c, s], [-s, c]])
                a[[p, q], :] = rot.T @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ rot
                vectors[:, [p, q]] = vectors[:, [p, q]] @ rot
    return np.diag(a).copy(), vectors


def _fix_signs(axes):
    """Flip each axis so its largest-magnitude entry is positive."""
    flips = np.where(axes[np.argmax(np.abs(axes), axis=0), np.arange(axes.shape[1])] < 0, -1.0, 1.0)
    return axes * flips


def fit_pca(features, variant="covariance"):
    """Fit a PcaModel to an n-by-d feature matrix.

    The sample covariance (divisor n - 1) of the scaled, centered data is
    diagonalized with cyclic Jacobi rotations. All-constant input yields a
    degenerate model with zero eigenvalues and uniform contributions.
    """
    x = np.asarray(features, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"features must be a 2-D matrix, got shape {x.shape}")
    n, d = x.shape
    if n < 2 or d < 1:
        raise ValueError(f"need at least 2 rows and 1 column, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite entries")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")

    degenerate = False
    scale = None
    if variant == "correlation":
        scale = x.std(axis=0, ddof=1)
    elif variant == "range":
        scale = x.max(axis=0) - x.min(axis=0)
    if scale is not None:
        if np.any(scale <= 0):
            degenerate = True
            scale = np.where(scale > 0, scale, 1.0)
        scale = scale.copy()

    mean = x.mean(axis=0)
    centered = (x - mean) / scale if scale is not None else x - mean
    cov = centered.T @ centered / (n - 1)

    eigenvalues, axes = jacobi_eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    axes = _fix_signs(axes[:, order])
    eigenvalues = np.where(eigenvalues > 0.0, eigenvalues, 0.0)

    total = eigenvalues.sum()
    if total > 0.0:
        contribution = eigenvalues / total
    else:
        contribution = np.full(d, 1.0 / d)
        degenerate = True

    for arr in (mean, axes, eigenvalues, contribution):
        arr.setflags(write=False)
    if scale is not None:
        scale.setflags(write=False)
    return PcaModel(
        mean=mean,
        scale=scale,
        axes=axes,
        eigenvalues=eigenvalues,
        contribution=contribution,
        variant=variant,
        degenerate=degenerate,
    )


def cumulative_contribution(model):
    """Running sum of the per-axis variance shares."""
    return np.cumsum(model.contribution)


def select_count(model, threshold):
    """Smallest number of leading axes whose cumulative share reaches ``threshold``."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    cum = cumulative_contribution(model)
    return int(np.argmax(cum >= threshold - 1e-12) + 1)


def project(model, features, n_components):
    """Project rows onto the first ``n_components`` principal axes."""
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.dims:
        raise ValueError(f"expected {model.dims} features, got {x.shape[1]}")
    if not 1 <= n_components <= model.dims:
        raise ValueError(f"n_components must lie in [1, {model.dims}], got {n_components}")
    centered = x - model.mean
    if model.scale is not None:
        centered = centered / model.scale
    out = centered @ model.axes[:, :n_components]
    return out[0] if single else out
