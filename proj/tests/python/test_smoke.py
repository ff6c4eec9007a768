"""Smoke tests for the python bindings (run via ctest with PYTHONPATH set)."""

import json
import math

import numpy as np

import rfa


def test_ridge():
    x = np.array([[1.0], [2.0], [3.0]])
    y = np.array([2.0, 4.0, 6.0])
    weights, bias = rfa.ridge_fit(x, y, 0.0)
    assert abs(weights[0] - 2.0) < 1e-10
    assert abs(bias) < 1e-10
    pred = rfa.ridge_predict(weights, bias, np.array([[5.0]]))
    assert abs(pred[0] - 10.0) < 1e-10

    # Penalty 1 on centered [1,2]/[1,2]: w = 1/3, bias = 1.
    w2, b2 = rfa.ridge_fit(np.array([[1.0], [2.0]]), np.array([1.0, 2.0]), 1.0)
    assert abs(w2[0] - 1.0 / 3.0) < 1e-12
    assert abs(b2 - 1.0) < 1e-12


def test_metrics():
    y = np.array([1.0, 2.0, 3.0])
    assert abs(rfa.r_squared(y, np.array([1.0, 2.0, 4.0])) - 0.5) < 1e-12
    assert abs(rfa.pearson_r(np.array([1.0, 2.0, 3.0, 4.0]),
                             np.array([1.0, 3.0, 2.0, 4.0])) - 0.8) < 1e-12
    t, p = rfa.paired_t_test(np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 3.0]))
    assert t == 0.0 and p == 1.0
    try:
        rfa.r_squared(np.array([1.0, 1.0]), np.array([1.0, 2.0]))
    except ArithmeticError:
        pass
    else:
        raise AssertionError("constant y_true must raise")


def test_pca():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 20))
    exact = rfa.pca_fit(x, 5, method="exact")
    rand = rfa.pca_fit(x, 5, method="randomized", seed=3)
    ev_exact = np.asarray(exact["explained_variance"])
    ev_rand = np.asarray(rand["explained_variance"])
    assert np.all(np.abs(ev_rand - ev_exact) / ev_exact < 0.01)
    basis = np.asarray(exact["components"])
    assert np.allclose(basis.T @ basis, np.eye(5), atol=1e-10)
    scores = rfa.pca_transform(x, exact["mean"], basis)
    assert scores.shape == (50, 5)


def test_adaptation():
    language = np.array([[1.0, 2.0], [3.0, 4.0]])
    factor = np.array([[2.0], [0.5]])
    adapted = rfa.adapt(language, factor)
    assert np.allclose(adapted, [[2.0, 4.0], [1.5, 2.0]])

    rng = np.random.default_rng(1)
    scaled = rng.uniform(size=(30, 11))
    assert rfa.interaction_factors(scaled).shape[1] == 66

    factors = rng.normal(size=(60, 4))
    y = 5.0 * factors[:, 0] + 3.0 * factors[:, 2] + 0.05 * rng.normal(size=60)
    kept = rfa.select_factors_rfe(factors, y, 2, seed=1)
    assert sorted(kept) == [0, 2]


def test_synthetic_and_experiment():
    data = rfa.generate_synthetic(n_instances=120, n_language_features=60,
                                  n_factors=5, seed=11)
    assert data["ngrams"].shape == (120, 60)
    assert data["factors"].shape == (120, 5)
    truth = json.loads(data["truth"])
    assert len(truth["beta"]) == 5

    report = json.loads(rfa.run_experiment(
        {"ngrams": data["ngrams"], "topics": data["topics"]},
        data["factors"], data["y"],
        families=["controls", "rfa"], folds=4, seed=3,
        k_best=40, n_components=8))
    labels = [m["label"] for m in report["models"]]
    assert labels == ["controls", "rfa"]
    for model in report["models"]:
        assert len(model["folds"]) == 4
        assert math.isfinite(model["pooled_r2"])

    pred = rfa.fit_predict({"ngrams": data["ngrams"]}, data["factors"], data["y"],
                           family="rc", k_best=40, n_components=8)
    assert pred.shape == (120,)
    assert rfa.r_squared(data["y"], pred) > 0.3


def main():
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok {name}")
    print("python smoke tests passed")


if __name__ == "__main__":
    main()
