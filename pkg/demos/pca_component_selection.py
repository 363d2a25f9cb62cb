"""How many principal components each dataset keeps, per scaling variant.

The component count is the smallest prefix whose cumulative contribution
reaches 90%. The published reference rates pin down which scaling each
dataset received: range scaling for iris and ba, raw covariance for ilpd and
bcw (balloons' binary features make the variants nearly identical).
"""
from pathlib import Path

from chi2nn.datasets import DATASET_IDS, load_dataset
from chi2nn.experiment import REFERENCE_CUMULATIVE_PC
from chi2nn.pca import VARIANTS, cumulative_contribution, fit_pca, select_count

DATA = Path(__file__).resolve().parents[1] / "data"

for dataset_id in DATASET_IDS:
    ds = load_dataset(dataset_id, DATA / dataset_id)
    print(f"== {dataset_id} ({ds.n_rows} rows, {ds.n_features} features)")
    ref = REFERENCE_CUMULATIVE_PC[dataset_id]
    print("   reference  : " + "  ".join(f"{v:6.2f}" for v in ref))
    for variant in VARIANTS:
        model = fit_pca(ds.features, variant)
        cum = 100.0 * cumulative_contribution(model)
        count = select_count(model, 0.90)
        shown = "  ".join(f"{v:6.2f}" for v in cum[:5])
        print(f"   {variant:<11}: {shown}   -> keep {count}")
    print()
