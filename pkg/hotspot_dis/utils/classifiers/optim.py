#!/usr/bin/env python

# optim.py - AdamW optimizer shared by the MLP and the patch networks

import numpy as np


class TrainingDivergedError(RuntimeError):
    """Non-finite loss during training."""

    def __init__(self, epoch, batch, loss):
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
        super().__init__(f'Loss became {loss} at epoch {epoch}, batch {batch}.')


def check_finite_loss(loss, epoch, batch):
    if not np.isfinite(loss):
        raise TrainingDivergedError(epoch, batch, loss)


class AdamW(object):
    """
    Adaptive moment estimation with decoupled weight decay.

    Parameters are a dict of numpy arrays updated in place. Names listed in
    `frozen` are left untouched.
    """

    def __init__(self, params, lr=1e-3, betas=(0.9, 0.999), eps=1e-8, weight_decay=1e-2,
                 frozen=()):
        if lr <= 0:
            raise ValueError(f'Learning rate must be positive, got {lr}.')
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.frozen = set(frozen)
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1 - self.beta1**self.t
        c2 = 1 - self.beta2**self.t
        for k, p in params.items():
            if k in self.frozen:
                continue
            g = grads[k]
            p *= 1 - self.lr * self.weight_decay
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g * g
            p -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)
