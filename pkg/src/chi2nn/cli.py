"""Command-line interface for the benchmark harness.

``chi2nn run`` executes experiments and writes a JSON report;
``chi2nn pca-report`` prints per-variant cumulative contribution rates next
to the published reference values.

Exit codes: 0 success, 1 usage error, 2 data missing/integrity error,
3 training diverged on every repetition of some experiment.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .datasets import DATASET_IDS, dump_encoded, load_dataset
from .errors import DataIntegrityError
from .experiment import (
    ExperimentConfig,
    MODEL_KINDS,
    REFERENCE_COMPONENT_COUNTS,
    REFERENCE_CUMULATIVE_PC,
    render_table,
    run_experiment,
    write_reports,
)
from .pca import VARIANTS, cumulative_contribution, fit_pca, select_count

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="chi2nn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run benchmark experiments", parents=[], add_help=True)
    run.add_argument("--dataset", default="all", choices=DATASET_IDS + ("all",))
    run.add_argument("--model", default="both", choices=MODEL_KINDS + ("both",))
    run.add_argument("--data-dir", default="data", help="root directory holding <id>/ raw files")
    run.add_argument("--k", type=int, default=2, help="sections per projected dimension")
    run.add_argument("--xi", type=float, default=0.5, help="surrogate output-derivative constant")
    run.add_argument("--lr", type=float, default=0.1, help="learning rate")
    run.add_argument("--hidden", type=int, default=10, help="hidden units")
    run.add_argument("--pca-threshold", type=float, default=0.90)
    run.add_argument("--pca-variant", default="auto", choices=("auto",) + VARIANTS,
                     help="feature scaling before PCA; auto follows the per-dataset protocol")
    run.add_argument("--pca-scope", default="pre_split", choices=("pre_split", "train_only"))
    run.add_argument("--train-frac", type=float, default=0.9)
    run.add_argument("--reps", type=int, default=20)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--max-epochs", type=int, default=5000)
    run.add_argument("--significance", type=float, default=0.10)
    run.add_argument("--epsilon-mode", default="quantile", choices=("quantile", "df"))
    run.add_argument("--gradient-mode", default="corrected", choices=("corrected", "original"))
    run.add_argument("--residual-norm", default="per_section", choices=("per_section", "global"))
    run.add_argument("--baseline-features", default="pca", choices=("pca", "raw"))
    run.add_argument("--baseline-lr", type=float, default=0.01)
    run.add_argument("--mse-goal", type=float, default=0.05)
    run.add_argument("--init-scale", type=float, default=0.5)
    run.add_argument("--out", default="report.json", help="JSON report path")
    run.add_argument("--dump-encoded", metavar="PATH", default=None,
                     help="also write the encoded dataset as CSV (single --dataset only)")

    pca_report = sub.add_parser(
        "pca-report", help="print cumulative contribution rates beside reference values"
    )
    pca_report.add_argument("--dataset", default="all", choices=DATASET_IDS + ("all",))
    pca_report.add_argument("--data-dir", default="data")
    pca_report.add_argument("--pca-threshold", type=float, default=0.90)
    return parser


def _dataset_list(choice):
    return list(DATASET_IDS) if choice == "all" else [choice]


def _run(args) -> int:
    try:
        config = ExperimentConfig(
            sections_per_dim=args.k,
            surrogate_slope=args.xi,
            learning_rate=args.lr,
            hidden_units=args.hidden,
            pca_threshold=args.pca_threshold,
            pca_variant=args.pca_variant,
            pca_scope=args.pca_scope,
            train_fraction=args.train_frac,
            repetitions=args.reps,
            base_seed=args.seed,
            max_epochs=args.max_epochs,
            significance=args.significance,
            epsilon_mode=args.epsilon_mode,
            gradient_mode=args.gradient_mode,
            residual_normalization=args.residual_norm,
            init_scale=args.init_scale,
            baseline_learning_rate=args.baseline_lr,
            mse_goal=args.mse_goal,
            baseline_features=args.baseline_features,
        )
    except ValueError as exc:
        print(f"chi2nn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    dataset_ids = _dataset_list(args.dataset)
    models = list(MODEL_KINDS) if args.model == "both" else [args.model]
    if args.dump_encoded and len(dataset_ids) != 1:
        print("chi2nn: error: --dump-encoded needs a single --dataset", file=sys.stderr)
        return EXIT_USAGE

    reports = []
    for dataset_id in dataset_ids:
        dataset = load_dataset(dataset_id, Path(args.data_dir) / dataset_id)
        if args.dump_encoded:
            dump_encoded(dataset, args.dump_encoded)
            print(f"encoded dataset written to {args.dump_encoded}")
        for model in models:
            report = run_experiment(dataset, model, config)
            reports.append(report)
            print(
                f"{dataset_id}/{model}: mean accuracy "
                f"{100.0 * report.mean_accuracy:.2f}% over {len(report.accuracies)} reps "
                f"({report.wall_seconds:.1f}s)",
                file=sys.stderr,
            )

    print(render_table(reports))
    write_reports(reports, args.out)
    print(f"report written to {args.out}")
    if any(not r.accuracies for r in reports):
        return EXIT_DIVERGED
    return EXIT_OK


def _pca_report(args) -> int:
    threshold = args.pca_threshold
    for dataset_id in _dataset_list(args.dataset):
        dataset = load_dataset(dataset_id, Path(args.data_dir) / dataset_id)
        print(f"== {dataset_id} (threshold {threshold:.2f})")
        reference = REFERENCE_CUMULATIVE_PC[dataset_id]
        print("  reference : " + "  ".join(f"{v:6.2f}" for v in reference)
              + f"   -> {REFERENCE_COMPONENT_COUNTS[dataset_id]} components")
        for variant in VARIANTS:
            model = fit_pca(dataset.features, variant)
            cum = 100.0 * cumulative_contribution(model)
            count = select_count(model, threshold)
            shown = "  ".join(f"{v:6.2f}" for v in cum[: max(len(reference), 5)])
            print(f"  {variant:<11}: {shown}   -> {count} components")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        return _pca_report(args)
    except (FileNotFoundError, OSError, DataIntegrityError) as exc:
        print(f"chi2nn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
