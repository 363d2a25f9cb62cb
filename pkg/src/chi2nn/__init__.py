"""Chi-square goodness-of-fit trained binary classifier and benchmark harness."""

from .baseline import BpnnConfig, BpnnNetwork, bpnn_predict, bpnn_train
from .binning import BinGrid, BinStats, bin_index, chi_square_stat, compute_stats, fit_grid
from .datasets import Dataset, Split, load_dataset, split_dataset
from .errors import DataIntegrityError, DivergenceError
from .experiment import ExperimentConfig, ExperimentReport, run_experiment
from .network import Chi2Network, TrainConfig, init_network, predict, train
from .pca import PcaModel, fit_pca, project, select_count
from .serialize import load_model, save_model
from .stats import ChiSquareCritical, chi2_cdf, chi2_quantile, regularized_gamma_lower

__all__ = [
    "BinGrid",
    "BinStats",
    "BpnnConfig",
    "BpnnNetwork",
    "Chi2Network",
    "ChiSquareCritical",
    "DataIntegrityError",
    "Dataset",
    "DivergenceError",
    "ExperimentConfig",
    "ExperimentReport",
    "PcaModel",
    "Split",
    "TrainConfig",
    "bin_index",
    "bpnn_predict",
    "bpnn_train",
    "chi2_cdf",
    "chi2_quantile",
    "chi_square_stat",
    "compute_stats",
    "fit_grid",
    "fit_pca",
    "init_network",
    "load_dataset",
    "load_model",
    "predict",
    "project",
    "regularized_gamma_lower",
    "run_experiment",
    "save_model",
    "select_count",
    "split_dataset",
    "train",
]

__version__ = "0.1.0"
