#!/usr/bin/env python

# gbdt.py - Second-order gradient boosted decision trees for binary classification
#
# Trees are grown greedily with exact split search. Each tree is stored as
# flat node arrays; node 0 is the root, leaves have feature == -1.

import warnings
from dataclasses import dataclass, asdict

import numpy as np

from hotspot_dis.utils.misc import sigmoid

PROB_CLIP = 1e-6


@dataclass
class GBDTParams:
    n_rounds: int = 100
    learning_rate: float = 0.1
    max_depth: int = 12
    feature_subsample: float = 0.8
    scale_pos_weight: float = 10.0
    lambda_reg: float = 1.0
    gamma: float = 0.0
    min_child_hessian: float = 1.0

    def __post_init__(self):
        if self.n_rounds < 0 or self.learning_rate <= 0 or self.max_depth < 0 \
                or not 0 < self.feature_subsample <= 1 or self.scale_pos_weight <= 0 \
                or self.lambda_reg < 0 or self.gamma < 0 or self.min_child_hessian < 0:
            raise ValueError(f'Invalid GBDT hyperparameters {asdict(self)}.')


class Tree(object):
    """Binary regression tree on flat arrays."""

    def __init__(self, feature, threshold, missing_left, left, right, value):
        self.feature = np.asarray(feature, dtype=int)
        self.threshold = np.asarray(threshold, dtype=float)
        self.missing_left = np.asarray(missing_left, dtype=bool)
        self.left = np.asarray(left, dtype=int)
        self.right = np.asarray(right, dtype=int)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self):
        return self.feature.size

    @property
    def depth(self):
        def _depth(k):
            if self.feature[k] < 0:
                return 0
            return 1 + max(_depth(self.left[k]), _depth(self.right[k]))
        return _depth(0)

    def apply(self, X):
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=int)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            k = node[active]
            x = X[active, self.feature[k]]
            go_left = np.where(np.isnan(x), self.missing_left[k], x < self.threshold[k])
            node[active] = np.where(go_left, self.left[k], self.right[k])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict(self, X):
        return self.value[self.apply(X)]

    def to_nested(self, k=0):
        if self.feature[k] < 0:
            return {'leaf': float(self.value[k])}
        return {'feature': int(self.feature[k]),
                'threshold': float(self.threshold[k]),
                'missing_left': bool(self.missing_left[k]),
                'left': self.to_nested(self.left[k]),
                'right': self.to_nested(self.right[k])}

    @classmethod
    def from_nested(cls, nested):
        builder = _TreeBuilder()

        def _add(node):
            k = builder.add()
            if 'leaf' in node:
                builder.set_leaf(k, node['leaf'])
            else:
                left = _add(node['left'])
                right = _add(node['right'])
                builder.set_split(k, node['feature'], node['threshold'], node['missing_left'],
                                  left, right)
            return k
        _add(nested)
        return builder.build()


class _TreeBuilder(object):
    def __init__(self):
        self.rows = []

    def add(self):
        self.rows.append([-1, 0.0, True, -1, -1, 0.0])
        return len(self.rows) - 1

    def set_leaf(self, k, value):
        self.rows[k][5] = float(value)

    def set_split(self, k, feature, threshold, missing_left, left, right):
        self.rows[k][:5] = [int(feature), float(threshold), bool(missing_left), left, right]

    def build(self):
        cols = list(zip(*self.rows))
        return Tree(*cols)


def find_best_split(X, g, h, rows, features, lambda_reg, gamma, min_child_hessian):
    """
    Exact greedy split search for one node.

    Every candidate threshold lies halfway between two adjacent distinct
    values of a feature; rows with x < threshold go left. Missing values are
    tried on both sides and may also form the right child on their own.
    Among splits of equal gain the lowest feature index wins, then the
    lowest threshold, then missing-left.

    Returns
    -------
    (feature, threshold, missing_left, gain) or None if no split has
    positive gain with both children above min_child_hessian.
    """
    if rows.size < 2 or features.size == 0:
        return None
    Xn = X[np.ix_(rows, features)]
    gn = g[rows]
    hn = h[rows]
    G = gn.sum()
    H = hn.sum()
    missing = np.isnan(Xn)
    Gm = gn @ missing
    Hm = hn @ missing

    order = np.argsort(np.where(missing, np.inf, Xn), axis=0, kind='stable')
    xs = np.take_along_axis(Xn, order, axis=0)
    GL0 = np.cumsum(gn[order], axis=0)[:-1]
    HL0 = np.cumsum(hn[order], axis=0)[:-1]
    lo = xs[:-1]
    hi = xs[1:]
    with np.errstate(invalid='ignore'):
        valid = lo < hi
    # After the last present value: present rows left, missing rows right
    isolate = ~np.isnan(lo) & np.isnan(hi)

    parent = G * G / (H + lambda_reg)
    gains = []
    for miss_left in (True, False):
        GL = GL0 + Gm if miss_left else GL0
        HL = HL0 + Hm if miss_left else HL0
        GR = G - GL
        HR = H - HL
        gain = 0.5 * (GL * GL / (HL + lambda_reg) + GR * GR / (HR + lambda_reg) - parent) - gamma
        allowed = valid if miss_left else valid | isolate
        ok = allowed & (HL >= min_child_hessian) & (HR >= min_child_hessian) & (gain > 0)
        gains.append(np.where(ok, gain, -np.inf))
    gains = np.stack(gains)             # (direction, position, feature)

    best = gains.max()
    if not np.isfinite(best):
        return None
    d, pos, f = np.nonzero(gains == best)
    pick = np.lexsort((d, pos, f))[0]
    d, pos, f = d[pick], pos[pick], f[pick]
    if np.isnan(hi[pos, f]):
        thr = np.nextafter(lo[pos, f], np.inf)
    else:
        thr = 0.5 * (lo[pos, f] + hi[pos, f])
        if not lo[pos, f] < thr:
            thr = hi[pos, f]
    return int(features[f]), float(thr), bool(d == 0), float(best)


def grow_tree(X, g, h, features, params):
    """Grow one tree depth-first from the node statistics g, h."""
    builder = _TreeBuilder()

    def _grow(rows, depth):
        k = builder.add()
        split = None
        if depth < params.max_depth:
            split = find_best_split(X, g, h, rows, features, params.lambda_reg, params.gamma,
                                    params.min_child_hessian)
        if split is None:
            builder.set_leaf(k, -g[rows].sum() / (h[rows].sum() + params.lambda_reg))
            return k
        feature, thr, miss_left, _ = split
        x = X[rows, feature]
        go_left = np.where(np.isnan(x), miss_left, x < thr)
        left = _grow(rows[go_left], depth + 1)
        right = _grow(rows[~go_left], depth + 1)
        builder.set_split(k, feature, thr, miss_left, left, right)
        return k

    _grow(np.arange(X.shape[0]), 0)
    return builder.build()


def sample_weights(y, scale_pos_weight):
    return np.where(y == 1, scale_pos_weight, 1.0)


def weighted_logloss(margin, y, scale_pos_weight):
    """Mean logistic loss with positives weighted by scale_pos_weight."""
    w = sample_weights(y, scale_pos_weight)
    losses = np.logaddexp(0.0, margin) - y * margin
    return float(np.sum(w * losses) / np.sum(w))


class GBDTModel(object):
    model_type = 'gbdt'

    def __init__(self, base_score, trees, n_features, params=None, seed=0):
        self.base_score = float(base_score)
        self.trees = list(trees)
        self.n_features = int(n_features)
        self.params = GBDTParams() if params is None else params
        self.seed = seed
        self.history = []

    def _check(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f'Model expects {self.n_features} features, got shape {X.shape}.')
        return X

    def staged_margin(self, X):
        """Margins after 0, 1, ..., len(trees) rounds, shape (rounds + 1, n)."""
        X = self._check(X)
        out = np.empty((len(self.trees) + 1, X.shape[0]))
        out[0] = self.base_score
        for i, tree in enumerate(self.trees):
            out[i + 1] = out[i] + self.params.learning_rate * tree.predict(X)
        return out

    def decision_function(self, X):
        X = self._check(X)
        margin = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            margin += self.params.learning_rate * tree.predict(X)
        return margin

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def to_dict(self):
        return {'hyperparameters': asdict(self.params),
                'seed': self.seed,
                'params': {'base_score': self.base_score,
                           'n_features': self.n_features,
                           'trees': [t.to_nested() for t in self.trees]}}


def prior_log_odds(y, scale_pos_weight):
    w = sample_weights(y, scale_pos_weight)
    p = np.clip(np.sum(w * y) / np.sum(w), PROB_CLIP, 1 - PROB_CLIP)
    return float(np.log(p / (1 - p)))


def train_gbdt(X, y, hp=None, seed=0, verbose=False):
    """
    Newton boosting on the logistic loss.

    Parameters
    ----------
    X : array-like, shape (n, d), raw features; NaN marks a missing value
    y : array-like of 0/1
    hp : GBDTParams
    seed : int
        Seeds the per-tree feature subsets.

    Returns
    -------
    GBDTModel
    """
    hp = GBDTParams() if hp is None else hp
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f'Incompatible shapes X {X.shape}, y {y.shape}.')
    if np.isinf(X).any():
        raise ValueError('X contains infinite values.')
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError('Labels must be 0 or 1.')
    n, d = X.shape
    if n == 0:
        raise ValueError('Cannot train on an empty dataset.')

    model = GBDTModel(prior_log_odds(y, hp.scale_pos_weight), [], d, hp, seed)
    if np.unique(y).size < 2:
        warnings.warn('Training labels contain a single class; the model only predicts '
                      'the prior.', UserWarning)
        return model

    rng = np.random.default_rng(seed)
    w = sample_weights(y, hp.scale_pos_weight)
    n_sel = int(np.ceil(hp.feature_subsample * d))
    margin = np.full(n, model.base_score)
    model.history.append(weighted_logloss(margin, y, hp.scale_pos_weight))
    for r in range(hp.n_rounds):
        p = sigmoid(margin)
        g = w * (p - y)
        h = w * p * (1 - p)
        if n_sel < d:
            features = np.sort(rng.choice(d, size=n_sel, replace=False))
        else:
            features = np.arange(d)
        tree = grow_tree(X, g, h, features, hp)
        model.trees.append(tree)
        margin += hp.learning_rate * tree.predict(X)
        model.history.append(weighted_logloss(margin, y, hp.scale_pos_weight))
        if verbose and (r % 10 == 0 or r == hp.n_rounds - 1):
            print(f'GBDT round {r}: {tree.n_nodes} nodes, loss {model.history[-1]:.5f}')
    return model
