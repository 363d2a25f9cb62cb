"""Single-hidden-layer binary classifier trained by per-section count matching.

The network carries sigmoid hidden units and a hard-threshold output. Training
never consumes labels row by row: it drives the count of predicted positives
v_i in each grid section toward the observed positive count of that section.
Two residual normalizations are available for the descent direction:

* ``per_section`` (default): residuals are per-section proportion errors,
  (v_i - c_i) / N_i, matching the predicted positive share of each section to
  its observed share. Every section pulls with comparable strength, which is
  what makes small sections learnable; benchmark reproduction selects this.
* ``global``: residuals are population-share errors, (v_i - c_i) / N, the
  squared-error form E = 1/2 * sum_i (v_i/N - p_i)^2 that the reports log.
  Small sections contribute O((N_i/N)^2) and are effectively ignored.

Because v_i sums hard thresholds, both objectives are piecewise constant in
the parameters; the backward pass substitutes a constant ``surrogate_slope``
for the output activation's derivative, which preserves descent direction but
not magnitudes. A smoothed variant (sigmoid in place of the hard output)
exists solely so the surrogate algebra can be verified against finite
differences.

Training stops once the Pearson statistic over sections drops below a
chi-square critical value at the effective degrees of freedom, or at the
epoch cap. A section with no observed positives drives the statistic to its
zero-expectation limit (+inf) whenever the network predicts a positive there,
so such predictions block the stop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .binning import bin_indices, chi_square_stat
from .errors import DivergenceError
from .stats import chi2_quantile

PARAMETER_LIMIT = 1e6

GRADIENT_MODES = ("corrected", "original")
EPSILON_MODES = ("quantile", "df")
RESIDUAL_NORMALIZATIONS = ("per_section", "global")

STOP_CHI_SQUARE = "chi_square_pass"
STOP_MAX_EPOCHS = "max_epochs"
STOP_DEGENERATE = "degenerate"


@dataclass
class Chi2Network:
    """Parameters of the classifier: (inputs r) -> (hidden h, sigmoid) -> threshold."""

    weights_in: np.ndarray  # (r, h)
    bias_hidden: np.ndarray  # (h,)
    weights_out: np.ndarray  # (h,)
    bias_out: float

    @property
    def inputs(self) -> int:
        return self.weights_in.shape[0]

    @property
    def hidden(self) -> int:
        return self.weights_in.shape[1]

    @property
    def parameter_count(self) -> int:
        return self.weights_in.size + self.bias_hidden.size + self.weights_out.size + 1

    def copy(self) -> "Chi2Network":
        return Chi2Network(
            weights_in=self.weights_in.copy(),
            bias_hidden=self.bias_hidden.copy(),
            weights_out=self.weights_out.copy(),
            bias_out=float(self.bias_out),
        )

    def max_abs_parameter(self) -> float:
        return max(
            float(np.abs(self.weights_in).max(initial=0.0)),
            float(np.abs(self.bias_hidden).max(initial=0.0)),
            float(np.abs(self.weights_out).max(initial=0.0)),
            abs(self.bias_out),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Training knobs; the defaults are the benchmark protocol's values."""

    surrogate_slope: float = 0.5
    learning_rate: float = 0.1
    significance: float = 0.10
    epsilon_mode: str = "quantile"
    gradient_mode: str = "corrected"
    residual_normalization: str = "per_section"
    max_epochs: int = 5000
    init_scale: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.learning_rate < 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1), got {self.learning_rate}")
        if self.surrogate_slope <= 0.0:
            raise ValueError(f"surrogate_slope must be positive, got {self.surrogate_slope}")
        if self.epsilon_mode not in EPSILON_MODES:
            raise ValueError(f"epsilon_mode must be one of {EPSILON_MODES}, got {self.epsilon_mode!r}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}, got {self.gradient_mode!r}")
        if self.residual_normalization not in RESIDUAL_NORMALIZATIONS:
            raise ValueError(
                f"residual_normalization must be one of {RESIDUAL_NORMALIZATIONS}, "
                f"got {self.residual_normalization!r}"
            )
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be nonnegative, got {self.max_epochs}")


@dataclass(frozen=True)
class EpochRecord:
    error: float
    chi_square: float
    effective_df: int
    threshold: float


@dataclass
class TrainTrace:
    epochs: list[EpochRecord] = field(default_factory=list)
    stop_reason: str = STOP_MAX_EPOCHS


@dataclass(frozen=True)
class Gradients:
    weights_in: np.ndarray
    bias_hidden: np.ndarray
    weights_out: np.ndarray
    bias_out: float


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_network(inputs, hidden, seed, init_scale=0.5):
    """Draw all parameters i.i.d. uniform on [-init_scale, init_scale]."""
    if inputs < 1 or hidden < 1:
        raise ValueError(f"need inputs >= 1 and hidden >= 1, got {inputs}, {hidden}")
    rng = np.random.default_rng(seed)
    s = float(init_scale)
    return Chi2Network(
        weights_in=rng.uniform(-s, s, size=(inputs, hidden)),
        bias_hidden=rng.uniform(-s, s, size=hidden),
        weights_out=rng.uniform(-s, s, size=hidden),
        bias_out=float(rng.uniform(-s, s)),
    )


def hidden_forward(net, x):
    """Hidden-layer activations for one input vector or a batch."""
    return sigmoid(np.asarray(x, dtype=float) @ net.weights_in + net.bias_hidden)


def output_score(net, hidden):
    """Pre-threshold output: weighted hidden activations plus bias."""
    return np.asarray(hidden, dtype=float) @ net.weights_out + net.bias_out


def output_forward(net, hidden):
    """Hard output decision: 1 when the score exceeds 0.5, else 0."""
    return int(output_score(net, hidden) > 0.5)


def predict(net, x):
    """Class decision for a single input vector."""
    return output_forward(net, hidden_forward(net, x))


def predict_batch(net, features):
    """Class decisions for every row of a feature matrix."""
    scores = output_score(net, hidden_forward(net, features))
    return (scores > 0.5).astype(np.int64)


def predicted_positive_counts(net, grid, features):
    """Count of predicted positives per grid section (v_i)."""
    preds = predict_batch(net, features)
    sections = bin_indices(grid, features)
    return np.bincount(sections, weights=preds.astype(float), minlength=grid.total_sections)


def count_match_error(predicted_counts, stats):
    """Squared count-share error: 1/2 * sum_i (v_i / N - p_i)^2."""
    v = np.asarray(predicted_counts, dtype=float)
    if v.shape != stats.positive_share.shape:
        raise ValueError(f"expected {stats.positive_share.shape[0]} sections, got {v.shape}")
    diff = v / stats.total - stats.positive_share
    return float(0.5 * np.sum(diff * diff))


def _row_weights(predicted_counts, stats, sections, scale):
    """Per-row surrogate error signal: scale * dE/dv of the row's section.

    ``global`` normalization differentiates E = 1/2 sum ((v_i - c_i)/N)^2;
    ``per_section`` differentiates E' = 1/2 sum ((v_i - c_i)/N_i)^2. Both
    weight every row of section i identically.
    """
    v = np.asarray(predicted_counts, dtype=float)
    if scale == "global":
        residual = (v / stats.total - stats.positive_share) / stats.total
    else:
        denom = np.maximum(stats.counts, 1)
        residual = (v - stats.expected_positives) / (denom * denom)
    if not np.all(np.isfinite(residual)):
        bad = int(np.flatnonzero(~np.isfinite(residual))[0])
        raise DivergenceError(f"non-finite count residual in section {bad}")
    return residual[sections]


def compute_gradients(net, features, sections, predicted_counts, stats, surrogate_slope,
                      gradient_mode="corrected", residual_normalization="per_section"):
    """Surrogate gradients of the count-matching error for every parameter group.

    Every row is weighted by the slope constant times its section's count
    residual under the chosen normalization; all sections contribute,
    including those with no observed positives. The hidden-layer chain passes
    through the output unit, whose hard threshold contributes the constant
    slope and whose incoming weight is the hidden-to-output weight.
    ``corrected`` mode uses that weight; the ``original`` formulation instead
    multiplies each input-to-hidden weight by itself (and, for hidden biases,
    by the column sum of input weights, the only batch reading that yields one
    number per hidden unit).
    """
    if gradient_mode not in GRADIENT_MODES:
        raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}, got {gradient_mode!r}")
    if residual_normalization not in RESIDUAL_NORMALIZATIONS:
        raise ValueError(
            f"residual_normalization must be one of {RESIDUAL_NORMALIZATIONS}, "
            f"got {residual_normalization!r}"
        )
    x = np.asarray(features, dtype=float)
    hidden = hidden_forward(net, x)
    return _gradients_from_hidden(
        net, x, hidden, sections, predicted_counts, stats,
        surrogate_slope, gradient_mode, residual_normalization,
    )


def _gradients_from_hidden(net, x, hidden, sections, predicted_counts, stats,
                           surrogate_slope, gradient_mode, residual_normalization):
    row_weight = surrogate_slope * _row_weights(predicted_counts, stats, sections, residual_normalization)

    grad_w_out = hidden.T @ row_weight
    grad_b_out = float(row_weight.sum())

    slope_term = row_weight[:, None] * hidden * (1.0 - hidden)
    if gradient_mode == "corrected":
        scaled = slope_term * net.weights_out
        grad_w_in = x.T @ scaled
        grad_b_hidden = scaled.sum(axis=0)
    else:
        grad_w_in = net.weights_in * (x.T @ slope_term)
        grad_b_hidden = net.weights_in.sum(axis=0) * slope_term.sum(axis=0)

    grads = Gradients(
        weights_in=grad_w_in,
        bias_hidden=grad_b_hidden,
        weights_out=grad_w_out,
        bias_out=grad_b_out,
    )
    for arr in (grads.weights_in, grads.bias_hidden, grads.weights_out):
        if not np.all(np.isfinite(arr)):
            raise DivergenceError("non-finite gradient")
    if not math.isfinite(grads.bias_out):
        raise DivergenceError("non-finite gradient")
    return grads


def apply_update(net, grads, learning_rate):
    """Step every parameter against its gradient, in place; returns the net."""
    net.weights_in -= learning_rate * grads.weights_in
    net.bias_hidden -= learning_rate * grads.bias_hidden
    net.weights_out -= learning_rate * grads.weights_out
    net.bias_out -= learning_rate * grads.bias_out
    return net


def soft_count_error(net, features, sections, stats, residual_normalization="per_section"):
    """Count-matching error with the hard output replaced by a sigmoid.

    Smooth in the parameters, so the surrogate backward pass can be checked
    against finite differences of this function.
    """
    x = np.asarray(features, dtype=float)
    q = sigmoid(output_score(net, hidden_forward(net, x)))
    v = np.bincount(sections, weights=q, minlength=stats.positive_share.shape[0])
    if residual_normalization == "global":
        return count_match_error(v, stats)
    denom = np.maximum(stats.counts, 1)
    diff = (v - stats.expected_positives) / denom
    return float(0.5 * np.sum(diff * diff))


def soft_gradients(net, features, sections, stats, residual_normalization="per_section"):
    """Exact gradients of soft_count_error (corrected chain, true output slope)."""
    x = np.asarray(features, dtype=float)
    hidden = hidden_forward(net, x)
    q = sigmoid(output_score(net, hidden))
    v = np.bincount(sections, weights=q, minlength=stats.positive_share.shape[0])
    row_weight = _row_weights(v, stats, sections, residual_normalization) * q * (1.0 - q)

    grad_w_out = hidden.T @ row_weight
    grad_b_out = float(row_weight.sum())
    scaled = row_weight[:, None] * hidden * (1.0 - hidden) * net.weights_out
    return Gradients(
        weights_in=x.T @ scaled,
        bias_hidden=scaled.sum(axis=0),
        weights_out=grad_w_out,
        bias_out=grad_b_out,
    )


def _check_parameters(net, epoch):
    bad = not all(
        np.all(np.isfinite(a)) for a in (net.weights_in, net.bias_hidden, net.weights_out)
    ) or not math.isfinite(net.bias_out)
    if bad or net.max_abs_parameter() > PARAMETER_LIMIT:
        raise DivergenceError(
            f"parameters exceeded {PARAMETER_LIMIT:g} or went non-finite at epoch {epoch}"
        )


def train(net, features, labels, grid, stats, config):
    """Full-batch training loop; returns (trained copy, trace).

    Each epoch evaluates the predicted-positive counts, the count-share error
    and the Pearson statistic, stops with ``chi_square_pass`` once the
    statistic drops below the critical value, and otherwise applies one
    surrogate-gradient step. A section with zero expected positives drives the
    statistic to its zero-expectation limit (+inf) whenever the network
    predicts a positive there, so such predictions block the stop even though
    they cannot enter the finite sum. When no section at all holds an observed
    positive the stop is undefined and the loop runs to the epoch cap with
    ``degenerate`` recorded instead.
    """
    net = net.copy()
    x = np.asarray(features, dtype=float)
    if x.shape[1] != net.inputs:
        raise ValueError(f"network expects {net.inputs} inputs, features have {x.shape[1]}")
    sections = bin_indices(grid, x)
    expected = stats.expected_positives
    empty = expected == 0.0
    degenerate = float(expected.sum()) == 0.0

    trace = TrainTrace()
    for epoch in range(config.max_epochs):
        hidden = hidden_forward(net, x)
        preds = (hidden @ net.weights_out + net.bias_out > 0.5).astype(float)
        counts = np.bincount(sections, weights=preds, minlength=grid.total_sections)
        error = count_match_error(counts, stats)
        if degenerate:
            trace.epochs.append(EpochRecord(error, math.nan, 0, math.nan))
        else:
            eta, effective_df = chi_square_stat(counts, expected)
            stray_positives = float(counts[empty].sum()) > 0.0
            if stray_positives:
                eta = math.inf
            if config.epsilon_mode == "quantile":
                threshold = chi2_quantile(effective_df, config.significance)
            else:
                threshold = float(effective_df)
            trace.epochs.append(EpochRecord(error, eta, effective_df, threshold))
            if eta < threshold:
                trace.stop_reason = STOP_CHI_SQUARE
                return net, trace
        grads = _gradients_from_hidden(
            net, x, hidden, sections, counts, stats, config.surrogate_slope,
            config.gradient_mode, config.residual_normalization,
        )
        apply_update(net, grads, config.learning_rate)
        _check_parameters(net, epoch)

    trace.stop_reason = STOP_DEGENERATE if degenerate else STOP_MAX_EPOCHS
    return net, trace
