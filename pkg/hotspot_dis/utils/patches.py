#!/usr/bin/env python

# patches.py - Patch extraction, assembly and ingestion

import warnings

import numpy as np

from hotspot_dis.core.records import RasterPatch, ShapeError
from hotspot_dis.utils.constants import PATCH_SIZE, PATCH_CHANNELS, N_S3_CHANNELS, \
    N_SLSTR_CHANNELS, N_OLCI_CHANNELS, LULC_CHANNEL, SLSTR_UPSAMPLE
from hotspot_dis.utils.resample import bicubic_upsample


def extract_patch(scene, row, col, size=PATCH_SIZE):
    """
    Cut a size x size window centred on pixel (row, col) of a scene raster.

    The centre pixel lands at index (size//2, size//2). Windows running over
    the scene edge repeat the edge pixels.

    Parameters
    ----------
    scene : array-like, shape (H, W, C)
    row, col : int
    size : int

    Returns
    -------
    numpy.ndarray, shape (size, size, C)
    """
    scene = np.asarray(scene)
    H, W = scene.shape[:2]
    if not (0 <= row < H and 0 <= col < W):
        raise ValueError(f'Pixel ({row}, {col}) outside a {H}x{W} scene.')
    half = size // 2
    rows = np.clip(np.arange(row - half, row - half + size), 0, H - 1)
    cols = np.clip(np.arange(col - half, col - half + size), 0, W - 1)
    return scene[np.ix_(rows, cols)]


def _majority(codes):
    vals, counts = np.unique(codes, return_counts=True)
    return vals[np.argmax(counts)]


def ingest_patch(hotspot_id, values, scene_means=None):
    """
    Turn a raw 32x32x33 grid into a validated RasterPatch.

    Missing Sentinel-3 pixels (NaN/inf) are replaced by the per-channel scene
    mean (or the patch mean of the valid pixels when no scene mean is given);
    missing land cover pixels take the most frequent class. Filled patches
    carry ``gap_filled = True``.

    Parameters
    ----------
    hotspot_id : int
    values : array-like, shape (32, 32, 33)
    scene_means : array-like of 32 floats, optional

    Returns
    -------
    RasterPatch
    """
    values = np.array(values, dtype=np.float32)
    if values.shape != (PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS):
        raise ShapeError(f'Patch {hotspot_id} has shape {values.shape}.')

    bad = ~np.isfinite(values)
    filled = bool(bad.any())
    if filled:
        for c in range(N_S3_CHANNELS):
            mask = bad[:, :, c]
            if not mask.any():
                continue
            if scene_means is not None:
                fill = scene_means[c]
            elif (~mask).any():
                fill = values[:, :, c][~mask].mean()
            else:
                raise ValueError(f'Patch {hotspot_id}: channel {c} has no valid pixels '
                                 'and no scene mean was given.')
            values[:, :, c][mask] = fill
        mask = bad[:, :, LULC_CHANNEL]
        if mask.any():
            if mask.all():
                raise ValueError(f'Patch {hotspot_id}: land cover channel is empty.')
            values[:, :, LULC_CHANNEL][mask] = _majority(values[:, :, LULC_CHANNEL][~mask])
        warnings.warn(f'Patch {hotspot_id}: {int(bad.sum())} missing pixel(s) filled.',
                      UserWarning)

    return RasterPatch(hotspot_id, values, gap_filled=filled).validate()


def assemble_patch(hotspot_id, slstr, olci, lulc, factor=SLSTR_UPSAMPLE, scene_means=None):
    """
    Build a patch from its three sources.

    Parameters
    ----------
    hotspot_id : int
    slstr : array-like, shape (h, w, 11)
        Coarse SLSTR channels; upsampled by `factor` and centre-cropped to 32x32.
    olci : array-like, shape (32, 32, 21)
    lulc : array-like, shape (32, 32)
        Land cover class codes.
    factor : int
    scene_means : optional per-channel fill values (see ingest_patch)

    Returns
    -------
    RasterPatch
    """
    slstr = np.asarray(slstr, dtype=float)
    olci = np.asarray(olci, dtype=float)
    lulc = np.asarray(lulc, dtype=float)
    if slstr.ndim != 3 or slstr.shape[2] != N_SLSTR_CHANNELS:
        raise ShapeError(f'SLSTR input must be (h, w, {N_SLSTR_CHANNELS}), got {slstr.shape}.')
    if olci.shape != (PATCH_SIZE, PATCH_SIZE, N_OLCI_CHANNELS):
        raise ShapeError(f'OLCI input must be {(PATCH_SIZE, PATCH_SIZE, N_OLCI_CHANNELS)}.')
    if lulc.shape != (PATCH_SIZE, PATCH_SIZE):
        raise ShapeError(f'Land cover input must be {(PATCH_SIZE, PATCH_SIZE)}.')

    up = bicubic_upsample(slstr, factor)
    if up.shape[0] < PATCH_SIZE or up.shape[1] < PATCH_SIZE:
        raise ShapeError(f'Upsampled SLSTR grid {up.shape[:2]} smaller than the patch.')
    r0 = (up.shape[0] - PATCH_SIZE) // 2
    c0 = (up.shape[1] - PATCH_SIZE) // 2
    up = up[r0:r0 + PATCH_SIZE, c0:c0 + PATCH_SIZE]

    values = np.concatenate([up, olci, lulc[:, :, None]], axis=2)
    return ingest_patch(hotspot_id, values, scene_means=scene_means)
