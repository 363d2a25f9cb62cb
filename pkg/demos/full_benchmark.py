"""The complete five-dataset comparison at the default protocol.

Twenty seeded 90/10 splits per dataset and model; prints the accuracy table
next to the published reference values. Takes a few minutes.
"""
from pathlib import Path

from chi2nn.datasets import DATASET_IDS, load_dataset
from chi2nn.experiment import (
    ExperimentConfig,
    REFERENCE_ACCURACY,
    render_table,
    run_experiment,
)

DATA = Path(__file__).resolve().parents[1] / "data"

config = ExperimentConfig()
reports = []
for dataset_id in DATASET_IDS:
    ds = load_dataset(dataset_id, DATA / dataset_id)
    for model in ("chi2nn", "bpnn"):
        report = run_experiment(ds, model, config)
        reports.append(report)
        ref = REFERENCE_ACCURACY[dataset_id][model]
        print(f"{dataset_id:<9} {model:<7} mean {100 * report.mean_accuracy:6.2f}%"
              f"  (reference {ref:6.2f}%)  stops={report.stop_reasons}"
              f"  {report.wall_seconds:5.1f}s")

print("\n" + render_table(reports))
