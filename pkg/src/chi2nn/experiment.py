"""Benchmark harness: repeated seeded splits, training, and accuracy reports.

``run_experiment`` executes the full protocol for one (dataset, model) pair:
fit PCA, keep the leading components that reach the contribution threshold,
bin the projected training rows, train, and score test accuracy - repeated
over seeded splits. Reports aggregate the per-repetition accuracies and
serialize to deterministic JSON (identical inputs produce byte-identical
files, so volatile fields such as wall-clock time stay out of the payload).
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import baseline, network
from .binning import compute_stats, fit_grid
from .datasets import DATASET_IDS, split_with_training_classes
from .errors import DivergenceError
from .pca import cumulative_contribution, fit_pca, project, select_count

SCHEMA_VERSION = 1
MODEL_KINDS = ("chi2nn", "bpnn")
PCA_SCOPES = ("pre_split", "train_only")

# Published reference results shipped with this benchmark (accuracy %).
REFERENCE_ACCURACY = {
    "iris": {"chi2nn": 100.0, "bpnn": 100.0},
    "ilpd": {"chi2nn": 68.97, "bpnn": 65.52},
    "ba": {"chi2nn": 84.67, "bpnn": 83.21},
    "bcw": {"chi2nn": 97.06, "bpnn": 94.12},
    "balloons": {"chi2nn": 87.5, "bpnn": 75.0},
}

# Published cumulative contribution rates (%) of the first five components.
REFERENCE_CUMULATIVE_PC = {
    "iris": (86.05, 96.88, 99.42, 100.0),
    "ilpd": (62.68, 94.34, 99.83, 99.97, 100.0),
    "ba": (55.39, 87.23, 95.5, 100.0),
    "bcw": (69.05, 76.25, 82.3, 86.74, 90.64),
    "balloons": (27.67, 53.88, 77.6, 100.0),
}

# Published component counts at the 90% threshold.
REFERENCE_COMPONENT_COUNTS = {"iris": 2, "ilpd": 2, "ba": 3, "bcw": 5, "balloons": 4}

# Feature scaling the published protocol demonstrably applied per dataset:
# the published cumulative contribution rates match range-scaled PCA exactly
# for iris and ba and raw-covariance PCA exactly for ilpd and bcw. Balloons
# carries binary features, for which range scaling and raw covariance
# coincide.
AUTO_VARIANTS = {
    "iris": "range",
    "ilpd": "covariance",
    "ba": "range",
    "bcw": "covariance",
    "balloons": "covariance",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Every knob of the benchmark protocol; defaults are the published ones."""

    sections_per_dim: int = 2
    surrogate_slope: float = 0.5
    learning_rate: float = 0.1
    hidden_units: int = 10
    pca_threshold: float = 0.90
    pca_variant: str = "auto"
    pca_scope: str = "pre_split"
    train_fraction: float = 0.9
    repetitions: int = 20
    base_seed: int = 42
    max_epochs: int = 5000
    significance: float = 0.10
    epsilon_mode: str = "quantile"
    gradient_mode: str = "corrected"
    residual_normalization: str = "per_section"
    init_scale: float = 0.5
    baseline_learning_rate: float = 0.01
    mse_goal: float = 0.05
    baseline_features: str = "pca"

    def __post_init__(self):
        if self.pca_scope not in PCA_SCOPES:
            raise ValueError(f"pca_scope must be one of {PCA_SCOPES}, got {self.pca_scope!r}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.baseline_features not in ("pca", "raw"):
            raise ValueError(f"baseline_features must be 'pca' or 'raw', got {self.baseline_features!r}")

    def variant_for(self, dataset_id) -> str:
        """Resolve the PCA scaling for one dataset (``auto`` follows AUTO_VARIANTS)."""
        if self.pca_variant != "auto":
            return self.pca_variant
        return AUTO_VARIANTS.get(dataset_id, "covariance")

    def train_config(self) -> network.TrainConfig:
        return network.TrainConfig(
            surrogate_slope=self.surrogate_slope,
            learning_rate=self.learning_rate,
            significance=self.significance,
            epsilon_mode=self.epsilon_mode,
            gradient_mode=self.gradient_mode,
            residual_normalization=self.residual_normalization,
            max_epochs=self.max_epochs,
            init_scale=self.init_scale,
        )

    def bpnn_config(self) -> baseline.BpnnConfig:
        return baseline.BpnnConfig(
            learning_rate=self.baseline_learning_rate,
            mse_goal=self.mse_goal,
            max_epochs=self.max_epochs,
            init_scale=self.init_scale,
        )


@dataclass
class ExperimentReport:
    """Accuracy distribution of one (dataset, model) pair over repetitions."""

    dataset: str
    model: str
    config: dict
    seeds: list[int] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    mean_accuracy: float = 0.0
    std_accuracy: float = 0.0
    pca_variant: str = "covariance"
    pca_scope: str = "pre_split"
    selected_components: list[int] = field(default_factory=list)
    cumulative_contribution_pct: list[float] = field(default_factory=list)
    stop_reasons: dict = field(default_factory=dict)
    diverged_seeds: list[int] = field(default_factory=list)
    wall_seconds: float = 0.0

    def to_dict(self) -> dict:
        """JSON payload; deliberately omits wall_seconds so identical runs
        serialize byte-identically."""
        return {
            "dataset": self.dataset,
            "model": self.model,
            "seeds": self.seeds,
            "accuracies": self.accuracies,
            "mean_accuracy": self.mean_accuracy,
            "std_accuracy": self.std_accuracy,
            "pca_variant": self.pca_variant,
            "pca_scope": self.pca_scope,
            "selected_components": self.selected_components,
            "cumulative_contribution_pct": self.cumulative_contribution_pct,
            "stop_reasons": self.stop_reasons,
            "diverged_seeds": self.diverged_seeds,
            "config": self.config,
        }


def _round6(values):
    return [round(float(v), 6) for v in values]


def _train_and_score(model_kind, z_train, y_train, z_test, y_test, seed, config):
    if model_kind == "chi2nn":
        grid = fit_grid(z_train, config.sections_per_dim)
        stats = compute_stats(grid, z_train, y_train)
        net = network.init_network(
            z_train.shape[1], config.hidden_units, seed, config.init_scale
        )
        net, trace = network.train(net, z_train, y_train, grid, stats, config.train_config())
        preds = network.predict_batch(net, z_test)
        stop = trace.stop_reason
    else:
        net, trace = baseline.bpnn_train(
            z_train, y_train, config.bpnn_config(), config.hidden_units, seed
        )
        preds = baseline.bpnn_predict_batch(net, z_test)
        stop = trace.stop_reason
    return float(np.mean(preds == y_test)), stop


def run_experiment(dataset, model_kind, config):
    """Run the repeated-split protocol for one dataset and model kind.

    Repetition t derives seed base_seed + t for both the split and the
    parameter initialization; splits that would leave a single-class training
    partition advance their seed until valid. Repetitions whose training
    diverges are excluded from the accuracy list and recorded by seed.
    """
    if model_kind not in MODEL_KINDS:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}, got {model_kind!r}")

    started = time.perf_counter()
    x, y = dataset.features, dataset.labels
    variant = config.variant_for(dataset.id)

    shared_pca = None
    shared_count = None
    if config.pca_scope == "pre_split":
        shared_pca = fit_pca(x, variant)
        shared_count = select_count(shared_pca, config.pca_threshold)

    report = ExperimentReport(
        dataset=dataset.id,
        model=model_kind,
        config=config_snapshot(config),
        pca_variant=variant,
        pca_scope=config.pca_scope,
    )
    stop_tally: dict[str, int] = {}

    for t in range(config.repetitions):
        seed = config.base_seed + t
        split = split_with_training_classes(dataset, config.train_fraction, seed)
        if config.pca_scope == "pre_split":
            pca, n_comp = shared_pca, shared_count
        else:
            pca = fit_pca(x[split.train_indices], variant)
            n_comp = select_count(pca, config.pca_threshold)

        use_pca = model_kind == "chi2nn" or config.baseline_features == "pca"
        if use_pca:
            z_train = project(pca, x[split.train_indices], n_comp)
            z_test = project(pca, x[split.test_indices], n_comp)
        else:
            z_train = x[split.train_indices]
            z_test = x[split.test_indices]

        if not report.cumulative_contribution_pct:
            report.cumulative_contribution_pct = _round6(100.0 * cumulative_contribution(pca))

        try:
            accuracy, stop = _train_and_score(
                model_kind, z_train, y[split.train_indices], z_test, y[split.test_indices],
                seed, config,
            )
        except DivergenceError:
            report.diverged_seeds.append(split.seed)
            continue
        report.seeds.append(split.seed)
        report.accuracies.append(round(accuracy, 12))
        report.selected_components.append(int(n_comp))
        stop_tally[stop] = stop_tally.get(stop, 0) + 1

    if report.accuracies:
        report.mean_accuracy = round(float(np.mean(report.accuracies)), 12)
        report.std_accuracy = round(float(np.std(report.accuracies)), 12)
    report.stop_reasons = {k: stop_tally[k] for k in sorted(stop_tally)}
    report.wall_seconds = time.perf_counter() - started
    return report


def config_snapshot(config) -> dict:
    """Plain dict of every config field, in declaration order."""
    return {k: v for k, v in asdict(config).items()}


def render_table(reports) -> str:
    """Markdown accuracy table: one row per dataset, one column per model."""
    if not reports:
        raise ValueError("no reports to render")
    models = [m for m in MODEL_KINDS if any(r.model == m for r in reports)]
    datasets = [d for d in DATASET_IDS if any(r.dataset == d for r in reports)]
    by_key = {(r.dataset, r.model): r for r in reports}

    lines = ["| Dataset | " + " | ".join(m.upper() for m in models) + " |"]
    lines.append("|" + "---|" * (len(models) + 1))
    for ds in datasets:
        cells = []
        for m in models:
            r = by_key.get((ds, m))
            cells.append(f"{100.0 * r.mean_accuracy:.2f}" if r else "-")
        lines.append(f"| {ds} | " + " | ".join(cells) + " |")
    return "\n".join(lines)


def reports_payload(reports) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": "chi2nn",
        "reports": [r.to_dict() for r in reports],
    }


def write_reports(reports, path):
    """Serialize reports to a deterministic JSON file."""
    Path(path).write_text(json.dumps(reports_payload(reports), indent=2) + "\n")
