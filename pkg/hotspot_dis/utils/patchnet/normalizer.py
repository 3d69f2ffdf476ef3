#!/usr/bin/env python

# normalizer.py - Per-channel patch normalisation with train-split statistics

import numpy as np

from hotspot_dis.utils.constants import N_S3_CHANNELS, LULC_CHANNEL, PATCH_CHANNELS

LULC_CENTER = 5.0
LULC_SCALE = 4.0


class PatchNormalizer(object):
    """
    Sentinel-3 channels are standardized with the per-channel mean and
    standard deviation over all pixels of the training patches. The land
    cover channel maps class code c to (c - 5) / 4, i.e. into [-1, 1].
    """

    def __init__(self, mean=None, std=None):
        self.mean = None if mean is None else np.asarray(mean, dtype=float)
        self.std = None if std is None else np.asarray(std, dtype=float)

    def fit(self, patches):
        x = np.asarray(patches, dtype=float)
        if x.ndim != 4 or x.shape[0] == 0 or x.shape[3] != PATCH_CHANNELS:
            raise ValueError(f'Cannot fit a patch normalizer on shape {x.shape}.')
        s3 = x[..., :N_S3_CHANNELS]
        self.mean = s3.mean(axis=(0, 1, 2))
        std = s3.std(axis=(0, 1, 2))
        self.std = np.where(std > 0, std, 1.0)
        return self

    def transform(self, patches):
        if self.mean is None:
            raise ValueError('PatchNormalizer used before fit.')
        x = np.array(patches, dtype=float)
        x[..., :N_S3_CHANNELS] = (x[..., :N_S3_CHANNELS] - self.mean) / self.std
        x[..., LULC_CHANNEL] = (x[..., LULC_CHANNEL] - LULC_CENTER) / LULC_SCALE
        return x

    def to_dict(self):
        return {'mean': self.mean.tolist(), 'std': self.std.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d['mean'], d['std'])
