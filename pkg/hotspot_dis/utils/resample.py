#!/usr/bin/env python

# resample.py - Bicubic (Keys) upsampling of coarse raster bands

import numpy as np

KEYS_A = -0.5


class ResampleError(ValueError):
    pass


def keys_kernel(x, a=KEYS_A):
    """Keys cubic convolution kernel (a = -0.5 is the Catmull-Rom spline)."""
    ax = np.abs(np.asarray(x, dtype=float))
    near = (a + 2) * ax**3 - (a + 3) * ax**2 + 1
    far = a * ax**3 - 5 * a * ax**2 + 8 * a * ax - 4 * a
    return np.where(ax <= 1, near, np.where(ax < 2, far, 0.0))


def upsample_matrix(n, factor):
    """
    Linear operator (n*factor, n) mapping input samples to output samples.

    Output pixel u is centred at input coordinate (u + 0.5) / factor - 0.5 so
    that input pixel i sits at the centre of output block i. Taps falling
    outside the grid are clamped to the edge pixel.
    """
    out = np.arange(n * factor)
    x = (out + 0.5) / factor - 0.5
    base = np.floor(x).astype(int)
    mat = np.zeros((n * factor, n))
    for k in range(-1, 3):
        taps = base + k
        w = keys_kernel(x - taps)
        np.add.at(mat, (out, np.clip(taps, 0, n - 1)), w)
    return mat


def bicubic_upsample(grid, factor):
    """
    Upsample a raster by an integer factor with bicubic convolution.

    Parameters
    ----------
    grid : array-like, shape (H, W) or (H, W, C)
    factor : int

    Returns
    -------
    numpy.ndarray, shape (H*factor, W*factor[, C]), float64
    """
    grid = np.asarray(grid, dtype=float)
    if int(factor) != factor or factor < 1:
        raise ResampleError(f'Upsampling factor must be a positive integer, got {factor}.')
    factor = int(factor)
    if grid.ndim not in (2, 3):
        raise ResampleError(f'Expected a 2-D or 3-D grid, got {grid.ndim} dimensions.')
    H, W = grid.shape[:2]
    if H < 4 or W < 4:
        raise ResampleError(f'Grid of {H}x{W} is too small for bicubic upsampling (min 4x4).')

    my = upsample_matrix(H, factor)
    mx = upsample_matrix(W, factor)
    if grid.ndim == 2:
        return my @ grid @ mx.T
    return np.einsum('uh,hwc,vw->uvc', my, grid, mx)
