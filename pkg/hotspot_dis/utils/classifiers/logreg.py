#!/usr/bin/env python

# logreg.py - Class-weighted logistic regression trained by full-batch gradient descent

from dataclasses import dataclass, asdict

import numpy as np

from hotspot_dis.utils.misc import sigmoid, bce_with_logits, class_weights


@dataclass
class LRParams:
    lr: float = 0.5
    epochs: int = 300
    l2: float = 1e-4
    class_weight: float = 1.0

    def __post_init__(self):
        if self.lr <= 0 or self.epochs < 0 or self.l2 < 0 or self.class_weight <= 0:
            raise ValueError(f'Invalid logistic regression hyperparameters {asdict(self)}.')


def check_xy(X, y=None):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f'X must be 2-D, got shape {X.shape}.')
    if not np.all(np.isfinite(X)):
        raise ValueError('X contains non-finite values.')
    if y is None:
        return X
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ValueError(f'y has shape {y.shape}, expected ({X.shape[0]},).')
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError('Labels must be 0 or 1.')
    return X, y.astype(float)


def logreg_loss_and_grad(w, b, X, y, sample_weight, l2):
    """
    Weighted mean BCE plus 0.5*l2*|w|^2, and its gradient.

    Returns
    -------
    loss : float
    dw : array, shape (d,)
    db : float
    """
    z = X @ w + b
    loss = bce_with_logits(z, y, sample_weight) + 0.5 * l2 * float(w @ w)
    r = sample_weight * (sigmoid(z) - y) / sample_weight.sum()
    return loss, X.T @ r + l2 * w, float(r.sum())


class LRModel(object):
    model_type = 'logreg'

    def __init__(self, weights, bias, params=None, seed=0, standardizer=None):
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        self.params = LRParams() if params is None else params
        self.seed = seed
        self.standardizer = standardizer
        self.history = []

    @property
    def n_features(self):
        return self.weights.size

    def decision_function(self, X):
        X = check_xy(X)
        if X.shape[1] != self.n_features:
            raise ValueError(f'Model expects {self.n_features} features, got {X.shape[1]}.')
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return X @ self.weights + self.bias

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def to_dict(self):
        return {'hyperparameters': asdict(self.params),
                'seed': self.seed,
                'params': {'weights': self.weights.tolist(), 'bias': self.bias},
                'standardizer': None if self.standardizer is None else self.standardizer.to_dict()}


def train_logreg(X, y, hp=None, seed=0, verbose=False):
    """
    Fit a logistic regression on standardized features.

    Parameters
    ----------
    X : array-like, shape (n, d)
    y : array-like of 0/1
    hp : LRParams
    seed : int
        Recorded with the model; initialisation is all zeros.

    Returns
    -------
    LRModel
    """
    hp = LRParams() if hp is None else hp
    X, y = check_xy(X, y)
    w = np.zeros(X.shape[1])
    b = 0.0
    sw = class_weights(y, hp.class_weight)
    model = LRModel(w, b, hp, seed)
    if X.shape[0] == 0:
        return model
    for epoch in range(hp.epochs):
        loss, dw, db = logreg_loss_and_grad(w, b, X, y, sw, hp.l2)
        model.history.append(loss)
        w -= hp.lr * dw
        b -= hp.lr * db
        if verbose and (epoch % 50 == 0 or epoch == hp.epochs - 1):
            print(f'LR epoch {epoch}: loss {loss:.5f}')
    model.weights = w
    model.bias = b
    return model
