#!/usr/bin/env python

# features.py - Per-hotspot feature computation and feature-set assembly

from dataclasses import dataclass, fields
from typing import Tuple

import numpy as np
import pandas as pd

from hotspot_dis.core.geo import TimeInterval, build_st_index
from hotspot_dis.utils.constants import FEATURE_BLOCKS, FEATURE_SETS, SENSOR_VALUES, \
    LULC_CLASSES, N_LULC, N_S3_CHANNELS, LULC_CHANNEL, PATCH_CENTER, NPH_RADIUS, \
    NPH_WINDOWS, SECONDS_PER_DAY, SECONDS_PER_WEEK, MONDAY_EPOCH


class LandCoverError(ValueError):
    pass


class MissingInputError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureSetConfig:
    """Which feature blocks enter the vector. Presets FS1-FS6 via `preset`."""
    name: str = 'custom'
    modis_viirs: bool = False
    time: bool = False
    land_cover: bool = False
    sentinel3: bool = False
    nph: bool = False

    def __post_init__(self):
        if not any(getattr(self, b) for b in FEATURE_BLOCKS):
            raise ValueError('A feature set needs at least one block.')

    @classmethod
    def preset(cls, name):
        if name not in FEATURE_SETS:
            raise ValueError(f'Unknown feature set {name}; choose from {sorted(FEATURE_SETS)}.')
        return cls(name=name, **{b: True for b in FEATURE_SETS[name]})

    @classmethod
    def from_spec(cls, spec):
        """Preset name or a dict of block flags (optionally with a name)."""
        if isinstance(spec, FeatureSetConfig):
            return spec
        if isinstance(spec, str):
            return cls.preset(spec)
        if isinstance(spec, dict):
            known = {f.name for f in fields(cls)}
            unknown = set(spec) - known
            if unknown:
                raise ValueError(f'Unknown feature set keys {sorted(unknown)}.')
            return cls(**spec)
        raise ValueError(f'Cannot interpret feature set {spec!r}.')

    @property
    def blocks(self):
        return tuple(b for b in FEATURE_BLOCKS if getattr(self, b))

    @property
    def needs_patch(self):
        return self.land_cover or self.sentinel3

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


BLOCK_NAMES = {
    'modis_viirs': tuple(SENSOR_VALUES) + tuple(f'has_{v}' for v in SENSOR_VALUES),
    'time': ('week_sin', 'week_cos', 'day_sin', 'day_cos'),
    'land_cover': tuple(f'lulc_{LULC_CLASSES[c]}' for c in range(1, N_LULC + 1)),
    'sentinel3': tuple(f's3_{c:02d}' for c in range(N_S3_CHANNELS)),
    'nph': tuple(f'nph{w}' for w in NPH_WINDOWS),
}


def feature_names(fs):
    names = []
    for b in fs.blocks:
        names.extend(BLOCK_NAMES[b])
    return names


def feature_dimension(fs):
    return len(feature_names(fs))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: Tuple[str, ...]

    def __len__(self):
        return len(self.names)


def compute_nph(idx, h, radius=NPH_RADIUS, windows=NPH_WINDOWS):
    """
    Number of previous hotspots within `radius` metres of h.

    For each window W (hours) counts records r != h with
    h.time - W*3600 <= r.time < h.time. Windows are cumulative.

    Returns
    -------
    tuple of int, one per window
    """
    lookback = max(windows) * 3600.0
    interval = TimeInterval(h.time - lookback, float(np.nextafter(h.time, -np.inf)))
    pos = idx.radius_positions(h.point, radius, interval)
    pos = pos[idx.ids[pos] != np.uint64(h.id)]
    times = idx.times[pos]
    return tuple(int(np.count_nonzero(times >= h.time - w * 3600.0)) for w in windows)


def compute_nph_batch(idx, hotspots, radius=NPH_RADIUS, windows=NPH_WINDOWS):
    """NPH triples for many hotspots as an (n, len(windows)) int array."""
    out = np.zeros((len(hotspots), len(windows)), dtype=int)
    for i, h in enumerate(hotspots):
        out[i] = compute_nph(idx, h, radius, windows)
    return out


def compute_time_features(t):
    """
    Week and day phase encodings of UTC timestamps.

    Returns [sin, cos] of the week phase (from Monday 00:00 UTC) followed by
    [sin, cos] of the day phase, stacked on the last axis.
    """
    t = np.asarray(t, dtype=float)
    w = np.mod(t - MONDAY_EPOCH, SECONDS_PER_WEEK) / SECONDS_PER_WEEK
    s = np.mod(t, SECONDS_PER_DAY) / SECONDS_PER_DAY
    return np.stack([np.sin(2 * np.pi * w), np.cos(2 * np.pi * w),
                     np.sin(2 * np.pi * s), np.cos(2 * np.pi * s)], axis=-1)


def encode_lulc(class_code):
    code = float(class_code)
    if code != np.round(code) or not 1 <= code <= N_LULC:
        raise LandCoverError(f'Land cover class code must be an integer in [1, {N_LULC}], '
                             f'got {class_code}.')
    onehot = np.zeros(N_LULC)
    onehot[int(code) - 1] = 1.0
    return onehot


def sensor_block(h):
    vals = h.sensor_values()
    present = np.isfinite(vals)
    return np.concatenate([np.where(present, vals, 0.0), present.astype(float)])


def assemble_features(h, fs, patch=None, nph=None):
    """
    Assemble the feature vector of one hotspot.

    Blocks follow the fixed order sensor | time | land_cover | sentinel3 | nph
    and only enabled blocks are included.

    Parameters
    ----------
    h : HotspotRecord
    fs : FeatureSetConfig
    patch : RasterPatch, required for land_cover / sentinel3
    nph : triple of counts, required for nph

    Returns
    -------
    FeatureVector
    """
    if fs.needs_patch and patch is None:
        raise MissingInputError(f'Feature set {fs.name} needs the patch of hotspot {h.id}.')
    if fs.nph and nph is None:
        raise MissingInputError(f'Feature set {fs.name} needs NPH counts of hotspot {h.id}.')

    parts = []
    if fs.modis_viirs:
        parts.append(sensor_block(h))
    if fs.time:
        parts.append(compute_time_features(h.time))
    if patch is not None:
        center = patch.values[PATCH_CENTER[0], PATCH_CENTER[1]].astype(float)
    if fs.land_cover:
        parts.append(encode_lulc(center[LULC_CHANNEL]))
    if fs.sentinel3:
        parts.append(center[:N_S3_CHANNELS])
    if fs.nph:
        parts.append(np.asarray(nph, dtype=float))
    return FeatureVector(np.concatenate(parts), tuple(feature_names(fs)))


def build_feature_matrix(hotspots, fs, patches=None, nph=None, idx=None):
    """
    Feature matrix of many hotspots as a DataFrame indexed by hotspot id.

    Parameters
    ----------
    hotspots : sequence of HotspotRecord
    fs : FeatureSetConfig
    patches : dict id -> RasterPatch, or sequence of RasterPatch
    nph : dict id -> triple, optional. Computed from `idx` (or an index over
          `hotspots`) when the feature set needs it and none is given.
    idx : STIndex, optional

    Returns
    -------
    pandas.DataFrame
    """
    if patches is not None and not isinstance(patches, dict):
        patches = {p.hotspot_id: p for p in patches}
    if fs.nph and nph is None:
        if idx is None:
            idx = build_st_index(hotspots)
        counts = compute_nph_batch(idx, hotspots)
        nph = {h.id: tuple(c) for h, c in zip(hotspots, counts)}

    rows = []
    for h in hotspots:
        patch = patches.get(h.id) if patches is not None else None
        rows.append(assemble_features(h, fs, patch=patch,
                                      nph=nph.get(h.id) if nph is not None else None).values)
    values = np.vstack(rows) if rows else np.zeros((0, feature_dimension(fs)))
    index = pd.Index([h.id for h in hotspots], dtype='uint64', name='id')
    return pd.DataFrame(values, index=index, columns=feature_names(fs))


def feature_frame(hotspots, fs, patches=None, nph=None, idx=None):
    """Feature matrix with a trailing `label` column (empty labels become -1)."""
    df = build_feature_matrix(hotspots, fs, patches=patches, nph=nph, idx=idx)
    df['label'] = [-1 if h.label is None else int(h.label) for h in hotspots]
    return df
