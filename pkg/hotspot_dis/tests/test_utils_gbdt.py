import numpy as np
import pytest

from hotspot_dis.utils.classifiers.gbdt import GBDTParams, train_gbdt, find_best_split, \
    prior_log_odds, weighted_logloss
from hotspot_dis.utils.metrics import compute_metrics, threshold


def _xor(seed=0, sizes=(40, 10, 10, 40)):
    """XOR quadrants; unequal sizes give the first split a positive gain."""
    rng = np.random.default_rng(seed)
    quads = [((1, 1), 1, sizes[0]), ((-1, -1), 1, sizes[1]), ((1, -1), 0, sizes[2]),
             ((-1, 1), 0, sizes[3])]
    X, y = [], []
    for (sx, sy), lab, n in quads:
        mag = rng.uniform(0.1, 1.0, (n, 2))
        X.append(mag * [sx, sy])
        y += [lab] * n
    return np.vstack(X), np.array(y)


def _noisy(n=300, d=5, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = ((X[:, 0] + 0.5 * X[:, 1] ** 2 + 0.5 * rng.normal(size=n)) > 1).astype(int)
    return X, y


def test_zero_rounds_predicts_weighted_prior():
    X, y = _noisy()
    model = train_gbdt(X, y, GBDTParams(n_rounds=0, scale_pos_weight=10))
    p = 10 * y.sum() / (10 * y.sum() + (y == 0).sum())
    assert np.allclose(model.predict_proba(X), p)
    assert np.isclose(model.base_score, prior_log_odds(y, 10))


def test_xor():
    X, y = _xor()
    hp = GBDTParams(n_rounds=50, max_depth=2, feature_subsample=1.0, scale_pos_weight=1)
    model = train_gbdt(X, y, hp)
    acc = np.mean((model.predict_proba(X) >= 0.5) == (y == 1))
    assert acc >= 0.98
    assert model.trees[0].depth == 2
    assert model.trees[0].feature[0] == 0


def test_balanced_xor_fits_training_set():
    X, y = _xor(seed=5, sizes=(40, 40, 40, 40))
    hp = GBDTParams(n_rounds=100, max_depth=2, feature_subsample=1.0, scale_pos_weight=1)
    model = train_gbdt(X, y, hp)
    m = compute_metrics(y, threshold(model.predict_proba(X)))
    assert m.f1 == 1.0
    assert m.fp == 0 and m.fn == 0


def test_loss_non_increasing_and_depth():
    X, y = _noisy()
    hp = GBDTParams(n_rounds=30, max_depth=3, feature_subsample=0.6)
    model = train_gbdt(X, y, hp, seed=2)
    assert len(model.history) == 31
    assert np.all(np.diff(model.history) <= 1e-12)
    assert all(t.depth <= 3 for t in model.trees)
    assert np.isclose(model.history[-1],
                      weighted_logloss(model.decision_function(X), y, hp.scale_pos_weight))

    staged = model.staged_margin(X)
    assert staged.shape == (31, X.shape[0])
    assert np.allclose(staged[-1], model.decision_function(X))


def test_reproducible_with_seed():
    X, y = _noisy()
    hp = GBDTParams(n_rounds=10, max_depth=4, feature_subsample=0.4)
    a = train_gbdt(X, y, hp, seed=7)
    b = train_gbdt(X, y, hp, seed=7)
    assert a.to_dict() == b.to_dict()
    # Each tree only splits on its seeded feature subset of ceil(0.4 * 5) = 2 features
    for t in a.trees:
        assert np.unique(t.feature[t.feature >= 0]).size <= 2


def test_single_class_warns():
    X, _ = _noisy(50)
    with pytest.warns(UserWarning, match='single class'):
        model = train_gbdt(X, np.zeros(50), GBDTParams(n_rounds=5))
    assert model.trees == []
    assert np.allclose(model.predict_proba(X), 1e-6)


def test_missing_values_routed():
    rng = np.random.default_rng(3)
    n = 200
    y = (rng.uniform(size=n) < 0.5).astype(int)
    X = rng.normal(size=(n, 2))
    X[y == 1, 0] = np.nan
    hp = GBDTParams(n_rounds=20, max_depth=2, feature_subsample=1.0, scale_pos_weight=1)
    model = train_gbdt(X, y, hp)
    p = model.predict_proba(X)
    assert np.all(p[y == 1] > 0.5)
    assert np.all(p[y == 0] < 0.5)
    test = np.array([[np.nan, 0.0], [0.3, 0.0]])
    assert model.predict_proba(test)[0] > 0.5 > model.predict_proba(test)[1]


def test_monotone_transform_keeps_structure():
    X, y = _noisy()
    hp = GBDTParams(n_rounds=8, max_depth=3, feature_subsample=0.8)
    a = train_gbdt(X, y, hp, seed=4)
    b = train_gbdt(np.exp(X), y, hp, seed=4)
    for ta, tb in zip(a.trees, b.trees):
        assert np.array_equal(ta.feature, tb.feature)
        assert np.allclose(ta.value, tb.value)
    assert np.allclose(a.decision_function(X), b.decision_function(np.exp(X)))


def test_split_search_ties_and_adjacent_values():
    x = np.array([0.0, 0.0, 1.0, 1.0])
    X = np.column_stack([x, x])
    g = np.array([1.0, 1.0, -1.0, -1.0])
    h = np.ones(4)
    feature, thr, _, gain = find_best_split(X, g, h, np.arange(4), np.arange(2), 1.0, 0.0, 0.0)
    assert feature == 0 and thr == 0.5 and gain > 0
    # Only the second feature offered
    assert find_best_split(X, g, h, np.arange(4), np.array([1]), 1.0, 0.0, 0.0)[0] == 1

    lo = 1.0
    hi = np.nextafter(1.0, 2.0)
    X = np.array([[lo], [hi]])
    _, thr, _, _ = find_best_split(X, np.array([1.0, -1.0]), np.ones(2), np.arange(2),
                                   np.arange(1), 1.0, 0.0, 0.0)
    assert lo < thr <= hi

    # Constant feature or a too-large hessian floor gives no split
    assert find_best_split(np.ones((4, 1)), g, h, np.arange(4), np.arange(1),
                           1.0, 0.0, 0.0) is None
    assert find_best_split(X[:, :1], np.array([1.0, -1.0]), np.ones(2), np.arange(2),
                           np.arange(1), 1.0, 0.0, 5.0) is None


def test_invalid_inputs():
    X, y = _noisy(20)
    with pytest.raises(ValueError):
        train_gbdt(np.zeros((0, 3)), np.zeros(0))
    with pytest.raises(ValueError):
        train_gbdt(X, y[:-1])
    bad = X.copy()
    bad[0, 0] = np.inf
    with pytest.raises(ValueError):
        train_gbdt(bad, y)
    with pytest.raises(ValueError):
        GBDTParams(feature_subsample=0.0)
