"""Tests for dataset generation and the MLP forward/backward pass."""

import math

import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression

from kdecay.datasets import Dataset, load_csv_dataset, make_synthetic_dataset
from kdecay.errors import DomainError
from kdecay.network import evaluate_error, forward_backward, gradient_check, init_mlp


def _linear_probe_train_accuracy(ds: Dataset) -> float:
    probe = LogisticRegression(max_iter=2000)
    x, y = ds.inputs[ds.train_idx], ds.labels[ds.train_idx]
    probe.fit(x, y)
    return float(probe.score(x, y))


class TestSyntheticDatasets:
    def test_blobs_without_noise_are_linearly_separable(self):
        ds = make_synthetic_dataset("gaussian_blobs", 1000, 2, noise=0.0, seed=7)
        assert _linear_probe_train_accuracy(ds) == 1.0

    def test_generation_is_deterministic(self):
        a = make_synthetic_dataset("gaussian_blobs", 1000, 4, noise=0.5, seed=7)
        b = make_synthetic_dataset("gaussian_blobs", 1000, 4, noise=0.5, seed=7)
        assert a.inputs.tobytes() == b.inputs.tobytes()
        assert a.labels.tobytes() == b.labels.tobytes()
        assert np.array_equal(a.train_idx, b.train_idx)
        assert np.array_equal(a.test_idx, b.test_idx)

    def test_two_spirals_not_linearly_separable(self):
        ds = make_synthetic_dataset("two_spirals", 2000, 2, noise=0.1, seed=3)
        assert _linear_probe_train_accuracy(ds) < 0.95

    def test_classes_balanced_within_one(self):
        ds = make_synthetic_dataset("gaussian_blobs", 1003, 4, noise=0.2, seed=1)
        counts = np.bincount(ds.labels, minlength=4)
        assert counts.max() - counts.min() <= 1

    def test_split_is_disjoint_and_80_20(self):
        ds = make_synthetic_dataset("gaussian_blobs", 1000, 4, noise=0.2, seed=1)
        assert np.intersect1d(ds.train_idx, ds.test_idx).size == 0
        assert ds.train_idx.size + ds.test_idx.size == 1000
        assert ds.train_idx.size == 800
        assert set(np.unique(ds.labels[ds.train_idx])) == {0, 1, 2, 3}

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            make_synthetic_dataset("gaussian_blobs", 1000, 0, noise=0.1, seed=1)
        with pytest.raises(DomainError):
            make_synthetic_dataset("gaussian_blobs", 15, 2, noise=0.1, seed=1)
        with pytest.raises(DomainError):
            make_synthetic_dataset("two_spirals", 1000, 3, noise=0.1, seed=1)
        with pytest.raises(DomainError):
            make_synthetic_dataset("moons", 1000, 2, noise=0.1, seed=1)

    def test_csv_round_trip(self, tmp_path):
        ds = make_synthetic_dataset("gaussian_blobs", 100, 2, noise=0.3, seed=5)
        path = tmp_path / "data.csv"
        rows = ["x0,x1,label"]
        rows += [f"{float(x[0])!r},{float(x[1])!r},{int(y)}" for x, y in zip(ds.inputs, ds.labels)]
        path.write_text("\n".join(rows) + "\n")
        loaded = load_csv_dataset(str(path), seed=0)
        assert loaded.inputs.tobytes() == ds.inputs.tobytes()
        assert np.array_equal(loaded.labels, ds.labels)
        assert loaded.num_classes == 2

    def test_csv_diagnostics(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x0,label\n1.0,0\nnot_a_number,1\n")
        with pytest.raises(DomainError, match="bad.csv:3"):
            load_csv_dataset(str(path))


def _zero_model(dims, activation="tanh"):
    model = init_mlp(dims, activation=activation, seed=0)
    for w in model.weights:
        w[:] = 0.0
    return model


class TestForwardBackward:
    def test_uniform_logits_give_log_c_loss(self):
        for c in (2, 5, 10):
            model = _zero_model((3, c))
            x = np.random.default_rng(0).standard_normal((8, 3))
            y = np.zeros(8, dtype=np.int64)
            loss, _ = forward_backward(model, x, y)
            assert loss == pytest.approx(math.log(c), abs=1e-12)

    def test_zero_single_layer_bias_gradient_closed_form(self):
        """With zero weights, d(loss)/db = softmax - onehot averaged: 1/C - freq."""
        c = 4
        model = _zero_model((2, c))
        x = np.random.default_rng(1).standard_normal((8, 2))
        y = np.array([0, 0, 0, 0, 1, 1, 2, 3])
        _, grads = forward_backward(model, x, y)
        freq = np.bincount(y, minlength=c) / y.size
        np.testing.assert_allclose(grads[0][1], 1.0 / c - freq, atol=1e-12)

    @pytest.mark.parametrize(
        "dims,activation,seed",
        [((2, 5, 3), "tanh", 11), ((4, 8, 8, 3), "tanh", 12), ((3, 6, 2), "relu", 13)],
    )
    def test_gradients_match_finite_differences(self, dims, activation, seed):
        """Independent exhaustive central-difference check, step 1e-5."""
        rng = np.random.default_rng(seed)
        model = init_mlp(dims, activation=activation, seed=seed)
        x = rng.standard_normal((16, dims[0]))
        y = rng.integers(0, dims[-1], size=16)
        _, grads = forward_backward(model, x, y)
        h = 1e-5
        checked = 0
        for layer, (dw, db) in enumerate(grads):
            for param, grad in ((model.weights[layer], dw), (model.biases[layer], db)):
                flat = param.reshape(-1)
                gflat = grad.reshape(-1)
                for i in range(flat.size):
                    orig = flat[i]
                    flat[i] = orig + h
                    lp, _ = forward_backward(model, x, y)
                    flat[i] = orig - h
                    lm, _ = forward_backward(model, x, y)
                    flat[i] = orig
                    fd = (lp - lm) / (2.0 * h)
                    rel = abs(gflat[i] - fd) / max(abs(gflat[i]), abs(fd), 1e-6)
                    assert rel <= 1e-4, f"layer {layer} coord {i}: {gflat[i]} vs {fd}"
                    checked += 1
        assert checked >= 30  # the three parametrized architectures total > 100

    def test_gradient_check_helper_agrees(self):
        model = init_mlp((2, 8, 2), activation="tanh", seed=3)
        rng = np.random.default_rng(3)
        x = rng.standard_normal((32, 2))
        y = rng.integers(0, 2, size=32)
        assert gradient_check(model, x, y, num_checks=60, seed=0) <= 1e-4

    def test_shape_mismatch_rejected(self):
        model = init_mlp((3, 2), seed=0)
        with pytest.raises(DomainError):
            forward_backward(model, np.zeros((4, 2)), np.zeros(4, dtype=int))
        with pytest.raises(DomainError):
            forward_backward(model, np.zeros((4, 3)), np.zeros(3, dtype=int))


class TestEvaluateError:
    def test_perfect_model_on_separable_blobs(self):
        ds = make_synthetic_dataset("gaussian_blobs", 100, 2, noise=0.0, seed=2)
        # nearest-centroid weights realize the separation exactly
        model = _zero_model((2, 2))
        centers = np.stack([ds.inputs[ds.labels == c].mean(axis=0) for c in (0, 1)], axis=1)
        model.weights[0][:] = centers
        model.biases[0][:] = -0.5 * (centers**2).sum(axis=0)
        assert evaluate_error(model, ds, "train") == 0.0
        assert evaluate_error(model, ds, "test") == 0.0

    def test_constant_output_model_errs_at_chance_complement(self):
        for c in (2, 5):
            ds = make_synthetic_dataset("gaussian_blobs", 1000, c, noise=0.5, seed=4)
            model = _zero_model((2, c))  # all logits equal: argmax ties to class 0
            err = evaluate_error(model, ds, "train")
            expected = (c - 1) / c
            assert err == pytest.approx(expected, abs=0.01)

    def test_predictions_independent_of_labels_err_near_half(self):
        rng = np.random.default_rng(9)
        inputs = rng.standard_normal((10000, 2))
        labels = rng.integers(0, 2, size=10000)
        labels[: labels.size // 2] = 0  # rebalance deterministically
        labels[labels.size // 2 :] = 1
        ds = Dataset(inputs, labels, np.arange(8000), np.arange(8000, 10000), 2)
        model = init_mlp((2, 4, 2), seed=5)
        assert evaluate_error(model, ds, "train") == pytest.approx(0.5, abs=0.02)

    def test_empty_split_rejected(self):
        ds = make_synthetic_dataset("gaussian_blobs", 100, 2, noise=0.1, seed=2)
        ds.test_idx = np.array([], dtype=np.int64)
        model = init_mlp((2, 2), seed=0)
        with pytest.raises(DomainError):
            evaluate_error(model, ds, "test")
