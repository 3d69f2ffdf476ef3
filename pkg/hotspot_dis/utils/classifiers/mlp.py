#!/usr/bin/env python

# mlp.py - Multi layer perceptron (ReLU hidden layers, sigmoid output) with manual backprop

from dataclasses import dataclass, asdict, field
from typing import Tuple

import numpy as np

from hotspot_dis.utils.constants import MLP_HIDDEN
from hotspot_dis.utils.misc import sigmoid, bce_with_logits, class_weights
from hotspot_dis.utils.classifiers.logreg import check_xy
from hotspot_dis.utils.classifiers.optim import AdamW, check_finite_loss


@dataclass
class MLPParams:
    hidden: Tuple[int, ...] = field(default_factory=lambda: tuple(MLP_HIDDEN))
    lr: float = 1e-3
    weight_decay: float = 1e-2
    epochs: int = 20
    batch_size: int = 128
    class_weight: float = 1.0
    zero_init_output: bool = False

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        if self.lr <= 0 or self.epochs < 0 or self.batch_size < 1 or self.class_weight <= 0 \
                or any(h < 1 for h in self.hidden):
            raise ValueError(f'Invalid MLP hyperparameters {asdict(self)}.')


def layer_names(n_layers):
    return [(f'W{i + 1}', f'b{i + 1}') for i in range(n_layers)]


def init_mlp(sizes, rng, zero_init_output=False):
    """Fan-in scaled uniform U(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation."""
    params = {}
    for i, (wn, bn) in enumerate(layer_names(len(sizes) - 1)):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        bound = 1.0 / np.sqrt(fan_in)
        params[wn] = rng.uniform(-bound, bound, (fan_in, fan_out))
        params[bn] = rng.uniform(-bound, bound, fan_out)
    if zero_init_output:
        wn, bn = layer_names(len(sizes) - 1)[-1]
        params[wn][:] = 0.0
        params[bn][:] = 0.0
    return params


def mlp_forward(params, X):
    """Output logits and the per-layer activations needed by backprop."""
    n_layers = len(params) // 2
    acts = [X]
    a = X
    for i, (wn, bn) in enumerate(layer_names(n_layers)):
        z = a @ params[wn] + params[bn]
        a = np.maximum(z, 0.0) if i < n_layers - 1 else z
        acts.append(a)
    return acts[-1][:, 0], acts


def mlp_loss_and_grads(params, X, y, sample_weight):
    """
    Weighted mean BCE of the network and its gradient for every parameter.

    Returns
    -------
    loss : float
    grads : dict name -> array
    """
    z, acts = mlp_forward(params, X)
    loss = bce_with_logits(z, y, sample_weight)
    n_layers = len(params) // 2
    delta = (sample_weight * (sigmoid(z) - y) / sample_weight.sum())[:, None]
    grads = {}
    for i in reversed(range(n_layers)):
        wn, bn = layer_names(n_layers)[i]
        grads[wn] = acts[i].T @ delta
        grads[bn] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params[wn].T) * (acts[i] > 0)
    return loss, grads


class MLPModel(object):
    model_type = 'mlp'

    def __init__(self, layers, params=None, seed=0, standardizer=None):
        self.layers = {k: np.asarray(v, dtype=float) for k, v in layers.items()}
        self.params = MLPParams() if params is None else params
        self.seed = seed
        self.standardizer = standardizer
        self.history = []

    @property
    def sizes(self):
        n_layers = len(self.layers) // 2
        return [self.layers['W1'].shape[0]] + \
            [self.layers[wn].shape[1] for wn, _ in layer_names(n_layers)]

    @property
    def n_features(self):
        return self.layers['W1'].shape[0]

    def decision_function(self, X):
        X = check_xy(X)
        if X.shape[1] != self.n_features:
            raise ValueError(f'Model expects {self.n_features} features, got {X.shape[1]}.')
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        return mlp_forward(self.layers, X)[0]

    def predict_proba(self, X):
        return sigmoid(self.decision_function(X))

    def to_dict(self):
        return {'hyperparameters': asdict(self.params),
                'seed': self.seed,
                'params': {k: {'shape': list(v.shape), 'values': v.ravel().tolist()}
                           for k, v in self.layers.items()},
                'standardizer': None if self.standardizer is None else self.standardizer.to_dict()}


def train_mlp(X, y, hp=None, seed=0, verbose=False):
    """
    Train an MLP [d, *hidden, 1] with AdamW on minibatches.

    Batches follow a seeded permutation drawn afresh every epoch.

    Parameters
    ----------
    X : array-like, shape (n, d), standardized
    y : array-like of 0/1
    hp : MLPParams
    seed : int

    Returns
    -------
    MLPModel

    Raises
    ------
    TrainingDivergedError if the loss becomes non-finite
    """
    hp = MLPParams() if hp is None else hp
    X, y = check_xy(X, y)
    rng = np.random.default_rng(seed)
    sizes = [X.shape[1]] + list(hp.hidden) + [1]
    params = init_mlp(sizes, rng, hp.zero_init_output)
    model = MLPModel(params, hp, seed)
    n = X.shape[0]
    if n == 0:
        return model
    sw = class_weights(y, hp.class_weight)
    opt = AdamW(params, lr=hp.lr, weight_decay=hp.weight_decay)
    for epoch in range(hp.epochs):
        order = rng.permutation(n)
        total = 0.0
        for batch, start in enumerate(range(0, n, hp.batch_size)):
            sel = order[start:start + hp.batch_size]
            loss, grads = mlp_loss_and_grads(params, X[sel], y[sel], sw[sel])
            check_finite_loss(loss, epoch, batch)
            opt.step(params, grads)
            total += loss * sel.size
        model.history.append(total / n)
        if verbose:
            print(f'MLP epoch {epoch}: loss {total / n:.5f}')
    model.layers = params
    return model
