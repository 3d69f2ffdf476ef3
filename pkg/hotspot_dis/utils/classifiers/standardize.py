#!/usr/bin/env python

# standardize.py - Per-feature standardisation fitted on the train split

import numpy as np


class Standardizer(object):
    """
    Column-wise (x - mean) / scale.

    The scale is the population standard deviation (ddof=0) of the fitted
    data; constant columns get scale 1 so they map to zero.
    """

    def __init__(self, mean=None, scale=None):
        self.mean = None if mean is None else np.asarray(mean, dtype=float)
        self.scale = None if scale is None else np.asarray(scale, dtype=float)

    @property
    def fitted(self):
        return self.mean is not None

    def fit(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError(f'Cannot fit a standardizer on an array of shape {X.shape}.')
        if not np.all(np.isfinite(X)):
            raise ValueError('Standardizer input contains non-finite values.')
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale = np.where(std > 0, std, 1.0)
        return self

    def transform(self, X):
        if not self.fitted:
            raise ValueError('Standardizer used before fit.')
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.mean.size:
            raise ValueError(f'Expected {self.mean.size} features, got shape {X.shape}.')
        return (X - self.mean) / self.scale

    def fit_transform(self, X):
        return self.fit(X).transform(X)

    def to_dict(self):
        return {'mean': self.mean.tolist(), 'scale': self.scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d['mean'], d['scale'])
