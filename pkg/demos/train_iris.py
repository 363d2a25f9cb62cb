"""Train the count-matching classifier once on iris and watch it stop.

One seeded 90/10 split, range-scaled PCA to two components, a 2x2 section
grid, then training until the Pearson statistic clears the chi-square bar.
"""
from pathlib import Path

import numpy as np

from chi2nn.binning import compute_stats, fit_grid
from chi2nn.datasets import load_dataset, split_with_training_classes
from chi2nn.network import TrainConfig, init_network, predict_batch, train
from chi2nn.pca import fit_pca, project, select_count
from chi2nn.serialize import load_model, save_model

DATA = Path(__file__).resolve().parents[1] / "data"

ds = load_dataset("iris", DATA / "iris")
split = split_with_training_classes(ds, 0.9, seed=42)

pca = fit_pca(ds.features, "range")
n_comp = select_count(pca, 0.90)
z = project(pca, ds.features, n_comp)
print(f"keeping {n_comp} components; projected training shape "
      f"{z[split.train_indices].shape}")

z_train, y_train = z[split.train_indices], ds.labels[split.train_indices]
z_test, y_test = z[split.test_indices], ds.labels[split.test_indices]

grid = fit_grid(z_train, 2)
stats = compute_stats(grid, z_train, y_train)
print(f"sections: {grid.total_sections}, observed positives per section: "
      f"{stats.positives.tolist()}")

net = init_network(n_comp, hidden=10, seed=42)
trained, trace = train(net, z_train, y_train, grid, stats, TrainConfig())

print(f"\nstopped after {len(trace.epochs)} epochs with '{trace.stop_reason}'")
for record in trace.epochs[:3]:
    print(f"  error={record.error:.4f}  statistic={record.chi_square:8.3f}"
          f"  threshold={record.threshold:.3f}")
if len(trace.epochs) > 3:
    last = trace.epochs[-1]
    print(f"  ... final: statistic={last.chi_square:.3f} < {last.threshold:.3f}")

accuracy = float(np.mean(predict_batch(trained, z_test) == y_test))
print(f"\ntest accuracy on {len(y_test)} held-out rows: {100 * accuracy:.1f}%")

path = Path("/tmp/iris_model.txt")
save_model(trained, path)
reloaded = load_model(path)
match = np.array_equal(predict_batch(reloaded, z_test), predict_batch(trained, z_test))
print(f"saved to {path}, reload predicts identically: {match}")
