#!/usr/bin/env python

# misc.py - Various utils

import hashlib
import json

import numpy as np
from scipy.special import expit


def sigmoid(z):
    return expit(z)


def bce_with_logits(z, y, weights=None):
    """Weighted mean binary cross-entropy computed from logits.

    Parameters
    ----------
    z : array-like
        Logits.
    y : array-like
        Binary targets.
    weights : array-like, optional
        Per-sample weights (default 1).

    Returns
    -------
    float
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(z) if weights is None else np.asarray(weights, dtype=float)
    losses = np.logaddexp(0.0, z) - y * z
    return float(np.sum(w * losses) / np.sum(w))


def class_weights(y, positive_weight):
    """Per-sample weights: `positive_weight` for positives, 1 otherwise."""
    y = np.asarray(y)
    return np.where(y == 1, float(positive_weight), 1.0)


def gradient(x, f, eps=1e-5):
    """
      Calculate f'(x): the central-difference numerical gradient of a function

      Parameters:
      -----------
      x : array-like (any shape)
      f : scalar function
      eps : float, step size

      Returns:
      --------
      array-like with the shape of x
    """
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fu = f(x)
        flat[i] = orig - eps
        fl = f(x)
        flat[i] = orig
        gflat[i] = (fu - fl) / (2 * eps)
    return grad


def relative_error(analytic, numeric):
    """Max absolute difference relative to the larger gradient magnitude."""
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-12)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def file_digest(paths):
    """sha256 hex digest over the contents of several files, in order."""
    h = hashlib.sha256()
    for p in paths:
        with open(p, 'rb') as f:
            for chunk in iter(lambda: f.read(1 << 20), b''):
                h.update(chunk)
    return h.hexdigest()


def config_hash(config_dict, length=8):
    """Short hash of a JSON-serialisable configuration."""
    text = json.dumps(config_dict, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:length]
