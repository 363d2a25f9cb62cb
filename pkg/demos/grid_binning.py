"""Equal-width section grids and the statistics the classifier trains on.

Projected training data is cut into K sections per dimension (K^L total);
each section keeps its row count N_i, observed positives c_i, and positive
share p_i. The Pearson statistic compares any vector of predicted-positive
counts v_i against the expected m_i = c_i.
"""
import numpy as np

from chi2nn.binning import bin_index, chi_square_stat, compute_stats, fit_grid

rng = np.random.default_rng(7)
cloud = np.concatenate([
    rng.normal([-1.5, 0.0], 0.6, size=(60, 2)),   # negatives, left
    rng.normal([+1.5, 0.5], 0.6, size=(40, 2)),   # positives, right
])
labels = np.array([0] * 60 + [1] * 40)

grid = fit_grid(cloud, 2)
print(f"grid: {grid.sections_per_dim} sections per dim, {grid.dims} dims,"
      f" {grid.total_sections} sections")
print(f"bounds: lows={np.round(grid.lows, 2)}, highs={np.round(grid.highs, 2)}")

print("\ncorner points map to the extreme sections:")
print(f"  lower corner -> section {bin_index(grid, grid.lows)}")
print(f"  upper corner -> section {bin_index(grid, grid.highs)} (right-closed)")

stats = compute_stats(grid, cloud, labels)
print("\nper-section statistics:")
print(f"  rows      N_i = {stats.counts.tolist()}")
print(f"  positives c_i = {stats.positives.tolist()}")
print(f"  share     p_i = {np.round(stats.positive_share, 3).tolist()}")

perfect = stats.expected_positives
sloppy = np.array([5.0, 0.0, 20.0, 15.0])
for name, v in (("matching counts", perfect), ("a sloppy guess", sloppy)):
    eta, df = chi_square_stat(v, stats.expected_positives)
    print(f"\n{name}: v = {v.tolist()}")
    print(f"  Pearson statistic {eta:.3f} on {df} effective degrees of freedom")
