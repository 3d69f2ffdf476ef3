#!/usr/bin/env python

# layers.py - Forward and backward passes of the convolutional building blocks
#
# Activations are channels-last arrays of shape (N, H, W, C).

import numpy as np

OFFSETS = [(di, dj) for di in range(3) for dj in range(3)]


def conv3x3(x, W, b):
    """3x3 convolution, stride 1, zero padding 1. W has shape (3, 3, Cin, Cout)."""
    N, H, Wd, _ = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    y = np.zeros((N, H, Wd, W.shape[3]), dtype=np.result_type(x, W))
    for di, dj in OFFSETS:
        y += np.tensordot(xp[:, di:di + H, dj:dj + Wd, :], W[di, dj], axes=([3], [0]))
    return y + b


def conv3x3_backward(dy, x, W):
    """Gradients of conv3x3 w.r.t. its input, weights and bias."""
    N, H, Wd, _ = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    dxp = np.zeros_like(xp, dtype=np.result_type(dy, W))
    dW = np.zeros_like(W, dtype=np.result_type(dy, x))
    for di, dj in OFFSETS:
        dW[di, dj] = np.tensordot(xp[:, di:di + H, dj:dj + Wd, :], dy, axes=([0, 1, 2], [0, 1, 2]))
        dxp[:, di:di + H, dj:dj + Wd, :] += np.tensordot(dy, W[di, dj], axes=([3], [1]))
    return dxp[:, 1:-1, 1:-1, :], dW, dy.sum(axis=(0, 1, 2))


def relu(x):
    return np.maximum(x, 0)


def avgpool2(x):
    N, H, W, C = x.shape
    return x.reshape(N, H // 2, 2, W // 2, 2, C).mean(axis=(2, 4))


def avgpool2_backward(dy):
    return np.repeat(np.repeat(dy, 2, axis=1), 2, axis=2) / 4


def global_avg_pool(x):
    return x.mean(axis=(1, 2))


def global_avg_pool_backward(dy, shape):
    N, H, W, C = shape
    return np.broadcast_to(dy[:, None, None, :] / (H * W), shape).copy()


def residual_block(x, W1, b1, W2, b2):
    """relu(x + conv2(relu(conv1(x)))); returns the output and the backward cache."""
    u = relu(conv3x3(x, W1, b1))
    v = conv3x3(u, W2, b2)
    y = relu(x + v)
    return y, (x, u, y)


def residual_block_backward(dy, cache, W1, W2):
    x, u, y = cache
    ds = dy * (y > 0)
    du, dW2, db2 = conv3x3_backward(ds, u, W2)
    du = du * (u > 0)
    dx, dW1, db1 = conv3x3_backward(du, x, W1)
    return dx + ds, dW1, db1, dW2, db2
