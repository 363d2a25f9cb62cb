"""Equal-width partition of a low-dimensional feature space into K^L sections.

The grid is fit on training data; every section keeps the statistics that
drive the count-matching error and the chi-square stop statistic: the row
count N_i, the positive-class share p_i, and the expected positive count
m_i = N * p_i (which equals the observed positive count c_i).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_SECTIONS = 2**20


@dataclass(frozen=True)
class BinGrid:
    """Per-dimension bounds of an equal-width K^L section grid."""

    lows: np.ndarray
    highs: np.ndarray
    sections_per_dim: int

    @property
    def dims(self) -> int:
        return self.lows.shape[0]

    @property
    def total_sections(self) -> int:
        return self.sections_per_dim**self.dims

    @property
    def widths(self) -> np.ndarray:
        return (self.highs - self.lows) / self.sections_per_dim

    @property
    def degenerate_dims(self) -> np.ndarray:
        """Mask of dimensions with zero spread (all rows map to section 0 there)."""
        return self.highs <= self.lows


@dataclass(frozen=True)
class BinStats:
    """Per-section training statistics.

    counts[i] is the number of training rows in section i, positives[i] the
    number of those with label 1, positive_share[i] = positives[i] / total,
    and expected_positives[i] = total * positive_share[i] = positives[i].
    """

    counts: np.ndarray
    positives: np.ndarray
    positive_share: np.ndarray
    expected_positives: np.ndarray
    total: int


def fit_grid(features, sections_per_dim):
    """Fit section bounds to the column ranges of a training matrix."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError(f"features must be a nonempty 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite entries")
    if not isinstance(sections_per_dim, int) or isinstance(sections_per_dim, bool) or sections_per_dim < 1:
        raise ValueError(f"sections_per_dim must be an integer >= 1, got {sections_per_dim!r}")
    if sections_per_dim ** x.shape[1] > MAX_SECTIONS:
        raise ValueError(
            f"grid of {sections_per_dim}^{x.shape[1]} sections exceeds the {MAX_SECTIONS} cap"
        )
    lows = x.min(axis=0)
    highs = x.max(axis=0)
    lows.setflags(write=False)
    highs.setflags(write=False)
    return BinGrid(lows=lows, highs=highs, sections_per_dim=sections_per_dim)


def bin_indices(grid, features):
    """Section index for every row; total (out-of-range rows clamp to edge sections).

    Within a dimension, value v falls in section floor((v - lo) / width),
    except that the top boundary belongs to the last section so the grid is
    exhaustive on the training hull. Per-dimension indices combine in mixed
    radix with dimension 0 least significant.
    """
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != grid.dims:
        raise ValueError(f"expected {grid.dims} columns, got {x.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite entries")

    k = grid.sections_per_dim
    widths = grid.widths
    safe = np.where(widths > 0, widths, 1.0)
    per_dim = np.floor((x - grid.lows) / safe).astype(np.int64)
    per_dim = np.clip(per_dim, 0, k - 1)
    per_dim[:, grid.degenerate_dims] = 0
    radix = k ** np.arange(grid.dims, dtype=np.int64)
    out = per_dim @ radix
    return int(out[0]) if single else out


def bin_index(grid, point):
    """Section index of a single point."""
    return bin_indices(grid, np.asarray(point, dtype=float))


def compute_stats(grid, features, labels):
    """Count rows and positives per section for aligned (features, labels)."""
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("features and labels must align row for row")
    if x.shape[0] == 0:
        raise ValueError("cannot compute section statistics from zero rows")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")

    total = x.shape[0]
    sections = bin_indices(grid, x)
    m = grid.total_sections
    counts = np.bincount(sections, minlength=m)
    positives = np.bincount(sections, weights=y.astype(float), minlength=m).astype(np.int64)
    share = positives / total
    expected = total * share
    for arr in (counts, positives, share, expected):
        arr.setflags(write=False)
    return BinStats(
        counts=counts,
        positives=positives,
        positive_share=share,
        expected_positives=expected,
        total=total,
    )


def chi_square_stat(observed, expected):
    """Pearson statistic over sections with positive expectation.

    Returns (eta, effective_df) where eta sums (v_i - m_i)^2 / m_i over the
    sections with m_i > 0 and effective_df is the count of those sections
    minus one, floored at 1. Sections with zero expectation cannot enter the
    statistic (the division is undefined), so they constrain neither eta nor
    the degrees of freedom.
    """
    v = np.asarray(observed, dtype=float)
    m = np.asarray(expected, dtype=float)
    if v.shape != m.shape or v.ndim != 1:
        raise ValueError(f"observed and expected must be equal-length vectors, got {v.shape} vs {m.shape}")
    if np.any(v < 0) or np.any(m < 0):
        raise ValueError("counts must be nonnegative")
    mask = m > 0
    if not mask.any():
        raise ValueError("all sections have zero expected positives; statistic undefined")
    eta = float(np.sum((v[mask] - m[mask]) ** 2 / m[mask]))
    effective_df = max(int(mask.sum()) - 1, 1)
    return eta, effective_df
