import math

import numpy as np
import pytest

from chi2nn.binning import bin_indices, compute_stats, fit_grid
from chi2nn.errors import DivergenceError
from chi2nn import network
from chi2nn.network import (
    Chi2Network,
    TrainConfig,
    apply_update,
    compute_gradients,
    count_match_error,
    hidden_forward,
    init_network,
    output_forward,
    output_score,
    predict,
    predict_batch,
    predicted_positive_counts,
    soft_count_error,
    soft_gradients,
    train,
)


def scalar_sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def zero_network(inputs, hidden):
    return init_network(inputs, hidden, seed=0, init_scale=0.0)


def one_dim_problem(labels, seed=0):
    """1-D feature, single section grid, stats from the given labels."""
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(labels.shape[0], 1))
    grid = fit_grid(x, 1)
    stats = compute_stats(grid, x, labels)
    return x, grid, stats


class TestInit:
    def test_deterministic(self):
        a = init_network(2, 10, seed=1)
        b = init_network(2, 10, seed=1)
        assert np.array_equal(a.weights_in, b.weights_in)
        assert np.array_equal(a.bias_hidden, b.bias_hidden)
        assert np.array_equal(a.weights_out, b.weights_out)
        assert a.bias_out == b.bias_out

    def test_zero_scale(self):
        net = zero_network(3, 4)
        assert np.all(net.weights_in == 0.0)
        assert np.all(hidden_forward(net, np.zeros(3)) == 0.5)

    def test_parameter_count(self):
        assert init_network(2, 10, seed=0).parameter_count == 41

    def test_scale_bounds(self):
        net = init_network(50, 50, seed=3, init_scale=0.25)
        assert net.max_abs_parameter() <= 0.25


class TestForward:
    def test_zero_network_hidden(self):
        net = zero_network(2, 5)
        assert np.allclose(hidden_forward(net, np.array([3.0, -4.0])), 0.5)

    def test_single_unit(self):
        net = Chi2Network(
            weights_in=np.array([[1.0]]),
            bias_hidden=np.array([0.0]),
            weights_out=np.array([1.0]),
            bias_out=0.0,
        )
        assert hidden_forward(net, np.array([0.0]))[0] == pytest.approx(0.5)

    def test_matches_scalar_loop(self):
        rng = np.random.default_rng(4)
        net = init_network(3, 4, seed=9)
        x = rng.normal(size=3)
        expected = [
            scalar_sigmoid(sum(net.weights_in[k, j] * x[k] for k in range(3)) + net.bias_hidden[j])
            for j in range(4)
        ]
        assert np.allclose(hidden_forward(net, x), expected, atol=1e-12)
        score = sum(net.weights_out[j] * expected[j] for j in range(4)) + net.bias_out
        assert output_score(net, hidden_forward(net, x)) == pytest.approx(score, abs=1e-12)

    def test_output_threshold_boundary(self):
        net = zero_network(1, 1)
        net.bias_out = 0.5
        assert output_forward(net, hidden_forward(net, np.array([0.0]))) == 0
        net.bias_out = 0.5 + 1e-9
        assert output_forward(net, hidden_forward(net, np.array([0.0]))) == 1

    def test_hand_scored_output(self):
        net = Chi2Network(
            weights_in=np.array([[0.0]]),
            bias_hidden=np.array([0.0]),
            weights_out=np.array([2.0]),
            bias_out=0.1,
        )
        assert output_forward(net, np.array([0.5])) == 1  # score 1.1

    def test_zero_network_predicts_negative(self):
        net = zero_network(2, 3)
        assert predict(net, np.array([5.0, -1.0])) == 0

    def test_batch_equals_scalar(self):
        rng = np.random.default_rng(5)
        net = init_network(2, 6, seed=11)
        xs = rng.normal(size=(40, 2))
        batch = predict_batch(net, xs)
        assert np.array_equal(batch, [predict(net, row) for row in xs])


class TestPredictedPositiveCounts:
    def test_all_negative_and_all_positive(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=(30, 2))
        grid = fit_grid(x, 2)
        net = zero_network(2, 3)
        assert np.all(predicted_positive_counts(net, grid, x) == 0.0)
        net.bias_out = 10.0
        counts = predicted_positive_counts(net, grid, x)
        per_section = np.bincount(bin_indices(grid, x), minlength=grid.total_sections)
        assert np.array_equal(counts, per_section.astype(float))

    def test_matches_row_by_row_tally(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(50, 2))
        grid = fit_grid(x, 2)
        net = init_network(2, 5, seed=13)
        sections = bin_indices(grid, x)
        expected = np.zeros(grid.total_sections)
        for row, section in zip(x, sections):
            expected[section] += predict(net, row)
        assert np.array_equal(predicted_positive_counts(net, grid, x), expected)


class TestCountMatchError:
    def test_zero_at_perfect_fit(self):
        x, grid, stats = one_dim_problem([1, 1, 0, 0, 1])
        assert count_match_error(stats.expected_positives, stats) == 0.0

    def test_hand_arithmetic(self):
        labels = np.array([1] * 5 + [0] * 5)
        x, grid, stats = one_dim_problem(labels)
        # single section: v=0 against p=0.5 and N=10 gives 1/2 * 0.25
        assert count_match_error(np.array([0.0]), stats) == pytest.approx(0.125)

    def test_term_by_term_oracle(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(60, 2))
        y = (rng.random(60) < 0.5).astype(int)
        grid = fit_grid(x, 4)
        stats = compute_stats(grid, x, y)
        v = rng.integers(0, 5, size=grid.total_sections).astype(float)
        expected = 0.5 * sum(
            (vi / stats.total - pi) ** 2 for vi, pi in zip(v, stats.positive_share)
        )
        assert count_match_error(v, stats) == pytest.approx(expected, abs=1e-12)


class TestGradients:
    def test_zero_at_stationary_point(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=(20, 2))
        y = (rng.random(20) < 0.4).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        sections = bin_indices(grid, x)
        net = init_network(2, 3, seed=17)
        for norm in ("global", "per_section"):
            grads = compute_gradients(
                net, x, sections, stats.expected_positives, stats, 0.5, "corrected", norm
            )
            assert np.all(grads.weights_in == 0.0)
            assert np.all(grads.bias_hidden == 0.0)
            assert np.all(grads.weights_out == 0.0)
            assert grads.bias_out == 0.0

    def test_single_row_hand_expansion(self):
        # one row, one section, one hidden unit: every gradient is a single
        # product chain evaluated here with plain scalar arithmetic
        x = np.array([[0.7]])
        grid = fit_grid(x, 1)
        stats = compute_stats(grid, x, np.array([0]))
        net = Chi2Network(
            weights_in=np.array([[0.3]]),
            bias_hidden=np.array([-0.1]),
            weights_out=np.array([0.9]),
            bias_out=0.2,
        )
        o = scalar_sigmoid(0.3 * 0.7 - 0.1)
        assert output_score(net, hidden_forward(net, x[0])) > 0.5  # so v = 1
        v = predicted_positive_counts(net, grid, x)
        xi = 0.5
        u = xi * 1.0  # residual (v - c)/N^2 = 1 with N = 1
        for norm in ("global", "per_section"):  # identical when N = N_i = 1
            g = compute_gradients(net, x, bin_indices(grid, x), v, stats, xi, "corrected", norm)
            assert g.weights_out[0] == pytest.approx(u * o, abs=1e-12)
            assert g.bias_out == pytest.approx(u, abs=1e-12)
            assert g.weights_in[0, 0] == pytest.approx(u * 0.9 * o * (1 - o) * 0.7, abs=1e-12)
            assert g.bias_hidden[0] == pytest.approx(u * 0.9 * o * (1 - o), abs=1e-12)
        g = compute_gradients(net, x, bin_indices(grid, x), v, stats, xi, "original")
        assert g.weights_in[0, 0] == pytest.approx(u * 0.3 * o * (1 - o) * 0.7, abs=1e-12)
        assert g.bias_hidden[0] == pytest.approx(u * 0.3 * o * (1 - o), abs=1e-12)

    def test_modes_share_output_layer_gradients(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=(25, 3))
        y = (rng.random(25) < 0.5).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        sections = bin_indices(grid, x)
        net = init_network(3, 4, seed=19)
        v = predicted_positive_counts(net, grid, x)
        a = compute_gradients(net, x, sections, v, stats, 0.5, "corrected")
        b = compute_gradients(net, x, sections, v, stats, 0.5, "original")
        assert np.array_equal(a.weights_out, b.weights_out)
        assert a.bias_out == b.bias_out
        assert not np.allclose(a.weights_in, b.weights_in)

    @pytest.mark.parametrize("norm", ["global", "per_section"])
    def test_soft_gradients_match_finite_differences(self, norm):
        rng = np.random.default_rng(21)
        for _ in range(10):
            n = int(rng.integers(5, 20))
            r = int(rng.integers(1, 4))
            h = int(rng.integers(1, 5))
            x = rng.normal(size=(n, r))
            y = (rng.random(n) < 0.5).astype(int)
            grid = fit_grid(x, 2)
            stats = compute_stats(grid, x, y)
            sections = bin_indices(grid, x)
            net = init_network(r, h, seed=int(rng.integers(0, 1000)))
            analytic = soft_gradients(net, x, sections, stats, norm)
            numeric = finite_difference_gradients(net, x, sections, stats, norm)
            for a, f in [
                (analytic.weights_in, numeric.weights_in),
                (analytic.bias_hidden, numeric.bias_hidden),
                (analytic.weights_out, numeric.weights_out),
                (np.array([analytic.bias_out]), np.array([numeric.bias_out])),
            ]:
                scale = np.maximum(np.maximum(np.abs(a), np.abs(f)), 1e-8)
                assert np.all(np.abs(a - f) / scale <= 1e-4)


def finite_difference_gradients(net, x, sections, stats, norm, step=1e-6):
    """Central differences of the smoothed count error, parameter by parameter."""
    def loss(candidate):
        return soft_count_error(candidate, x, sections, stats, norm)

    def perturb(attr, index, delta):
        c = net.copy()
        if attr == "bias_out":
            c.bias_out += delta
        else:
            getattr(c, attr)[index] += delta
        return c

    grads = {}
    for attr in ("weights_in", "bias_hidden", "weights_out"):
        arr = getattr(net, attr)
        out = np.zeros_like(arr)
        for index in np.ndindex(arr.shape):
            up = loss(perturb(attr, index, step))
            down = loss(perturb(attr, index, -step))
            out[index] = (up - down) / (2.0 * step)
        grads[attr] = out
    up = loss(perturb("bias_out", None, step))
    down = loss(perturb("bias_out", None, -step))
    return network.Gradients(
        weights_in=grads["weights_in"],
        bias_hidden=grads["bias_hidden"],
        weights_out=grads["weights_out"],
        bias_out=(up - down) / (2.0 * step),
    )


class TestApplyUpdate:
    def test_zero_gradients_leave_net_unchanged(self):
        net = init_network(2, 3, seed=23)
        before = net.copy()
        zero = network.Gradients(
            weights_in=np.zeros((2, 3)),
            bias_hidden=np.zeros(3),
            weights_out=np.zeros(3),
            bias_out=0.0,
        )
        apply_update(net, zero, 0.1)
        assert np.array_equal(net.weights_in, before.weights_in)
        assert net.bias_out == before.bias_out

    def test_scalar_step(self):
        net = Chi2Network(
            weights_in=np.array([[1.0]]),
            bias_hidden=np.array([0.0]),
            weights_out=np.array([0.0]),
            bias_out=0.0,
        )
        grads = network.Gradients(
            weights_in=np.array([[2.0]]),
            bias_hidden=np.array([0.0]),
            weights_out=np.array([0.0]),
            bias_out=0.0,
        )
        apply_update(net, grads, 0.1)
        assert net.weights_in[0, 0] == pytest.approx(0.8)

    def test_reversibility(self):
        net = init_network(2, 4, seed=29)
        before = net.copy()
        rng = np.random.default_rng(0)
        grads = network.Gradients(
            weights_in=rng.normal(size=(2, 4)),
            bias_hidden=rng.normal(size=4),
            weights_out=rng.normal(size=4),
            bias_out=float(rng.normal()),
        )
        apply_update(net, grads, 0.1)
        apply_update(net, grads, -0.1)
        assert np.allclose(net.weights_in, before.weights_in, atol=1e-15)
        assert np.allclose(net.bias_hidden, before.bias_hidden, atol=1e-15)
        assert np.allclose(net.weights_out, before.weights_out, atol=1e-15)
        assert net.bias_out == pytest.approx(before.bias_out, abs=1e-15)


class TestTrain:
    def test_immediate_pass_applies_no_updates(self):
        x, grid, stats = one_dim_problem([1] * 8)
        net = zero_network(1, 2)
        net.bias_out = 5.0  # predicts everything positive, matching counts
        trained, trace = train(net, x, np.ones(8, dtype=int), grid, stats, TrainConfig(max_epochs=50))
        assert trace.stop_reason == "chi_square_pass"
        assert len(trace.epochs) == 1
        assert trace.epochs[-1].chi_square < trace.epochs[-1].threshold
        assert np.array_equal(trained.weights_in, net.weights_in)
        assert trained.bias_out == net.bias_out
        # every training point of this perfectly fitting net keeps its label
        assert np.array_equal(predict_batch(trained, x), np.ones(8, dtype=int))

    def test_zero_epochs(self):
        x, grid, stats = one_dim_problem([1, 0, 1, 0])
        net = init_network(1, 2, seed=31)
        trained, trace = train(net, x, np.array([1, 0, 1, 0]), grid, stats, TrainConfig(max_epochs=0))
        assert trace.stop_reason == "max_epochs"
        assert trace.epochs == []
        assert np.array_equal(trained.weights_in, net.weights_in)

    def test_degenerate_runs_to_cap(self):
        labels = np.zeros(6, dtype=int)
        x, grid, stats = one_dim_problem(labels)
        net = init_network(1, 2, seed=37)
        _, trace = train(net, x, labels, grid, stats, TrainConfig(max_epochs=5))
        assert trace.stop_reason == "degenerate"
        assert len(trace.epochs) == 5
        assert all(math.isnan(rec.chi_square) for rec in trace.epochs)

    def test_training_does_not_mutate_input_net(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=(30, 2))
        y = (x[:, 0] > 0).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        net = init_network(2, 4, seed=41)
        snapshot = net.copy()
        train(net, x, y, grid, stats, TrainConfig(max_epochs=20))
        assert np.array_equal(net.weights_in, snapshot.weights_in)
        assert net.bias_out == snapshot.bias_out

    def test_deterministic(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=(40, 2))
        y = (x.sum(axis=1) > 0).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        results = []
        for _ in range(2):
            net = init_network(2, 5, seed=43)
            trained, trace = train(net, x, y, grid, stats, TrainConfig(max_epochs=100))
            results.append((trained, trace))
        a, b = results
        assert np.array_equal(a[0].weights_in, b[0].weights_in)
        assert a[0].bias_out == b[0].bias_out
        assert a[1].stop_reason == b[1].stop_reason
        assert [r.chi_square for r in a[1].epochs] == [r.chi_square for r in b[1].epochs]

    def test_trace_invariants(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=(50, 2))
        y = (x[:, 0] > 0.2).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        net = init_network(2, 5, seed=47)
        _, trace = train(net, x, y, grid, stats, TrainConfig(max_epochs=30))
        assert len(trace.epochs) <= 30
        if trace.stop_reason == "chi_square_pass":
            assert trace.epochs[-1].chi_square < trace.epochs[-1].threshold
        for rec in trace.epochs:
            assert rec.error >= 0.0

    def test_divergence_guard(self):
        labels = np.ones(6, dtype=int)
        x, grid, stats = one_dim_problem(labels, seed=3)
        net = Chi2Network(
            weights_in=np.array([[5e6, -5e6]]),  # already past the runaway limit
            bias_hidden=np.zeros(2),
            weights_out=np.array([0.2, 0.2]),
            bias_out=0.0,
        )
        # everything predicted negative, so counts stay off target and the
        # first update leaves the oversized parameters in place
        with pytest.raises(DivergenceError):
            train(net, x, labels, grid, stats, TrainConfig(max_epochs=10))

    def test_hard_output_boundedness(self):
        # counts stay within [0, N_i] and the count-share error within its
        # worst-case bound for any parameter setting
        rng = np.random.default_rng(14)
        x = rng.normal(size=(60, 2))
        y = (rng.random(60) < 0.35).astype(int)
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        bound = 0.5 * float(
            np.sum(np.maximum(stats.positive_share, stats.counts / stats.total - stats.positive_share) ** 2)
        )
        for seed in range(25):
            net = init_network(2, 4, seed=seed, init_scale=3.0)
            v = predicted_positive_counts(net, grid, x)
            assert np.all(v >= 0) and np.all(v <= stats.counts)
            assert count_match_error(v, stats) <= bound + 1e-12

    def test_zero_error_implies_zero_statistic(self):
        # the squared count-share error and the Pearson statistic share their
        # zeros: a network reproducing every per-section positive count has
        # both at exactly zero
        from chi2nn.binning import chi_square_stat

        x = np.array([[0.0], [0.2], [0.8], [1.0]])
        y = np.array([1, 1, 0, 0])
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        net = Chi2Network(
            weights_in=np.array([[-60.0]]),
            bias_hidden=np.array([30.0]),   # hidden ~1 left of center, ~0 right
            weights_out=np.array([1.0]),
            bias_out=0.0,
        )
        v = predicted_positive_counts(net, grid, x)
        assert np.array_equal(v, stats.expected_positives)
        assert count_match_error(v, stats) == 0.0
        eta, _ = chi_square_stat(v, stats.expected_positives)
        assert eta == 0.0

    def test_stray_positive_in_empty_section_blocks_stop(self):
        # two sections; all observed positives sit in section 0; a network
        # predicting a positive in section 1 must not stop, whatever eta is
        x = np.array([[0.0], [0.1], [0.9], [1.0]])
        y = np.array([1, 1, 0, 0])
        grid = fit_grid(x, 2)
        stats = compute_stats(grid, x, y)
        net = zero_network(1, 1)
        net.bias_out = 5.0  # everything predicted positive, including section 1
        _, trace = train(net, x, y, grid, stats, TrainConfig(max_epochs=1))
        assert trace.stop_reason == "max_epochs"
        assert math.isinf(trace.epochs[0].chi_square)
