#!/usr/bin/env python

# sampling.py - Class-imbalance undersampling, subsetting and stratified splits

import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from hotspot_dis.utils.constants import TARGET_POS_FRAC, CELL_DEG, N_SPLITS, ROLE_SPLITS, \
    S3_AVAILABLE_FROM
from hotspot_dis.utils.hs_io.csv_io import parse_datetime

ROLES = ('train', 'val', 'test')


class SamplingError(ValueError):
    pass


def _labels(records):
    labels = [r.label for r in records]
    if any(lab is None for lab in labels):
        raise SamplingError('Every record must be labeled before sampling.')
    return np.array(labels, dtype=int)


def _cells(records, cell_deg):
    if cell_deg <= 0:
        raise SamplingError(f'Cell size must be positive, got {cell_deg}.')
    lat = np.array([r.point.lat for r in records], dtype=float)
    lon = np.array([r.point.lon for r in records], dtype=float)
    return np.floor(lat / cell_deg).astype(int), np.floor(lon / cell_deg).astype(int)


def _strata(*keys):
    """Stratum number of each record; strata numbered in sorted key order."""
    stacked = np.stack(keys, axis=1)
    if stacked.shape[0] == 0:
        return np.zeros(0, dtype=int), 0
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    return inverse.reshape(-1), uniq.shape[0]


def largest_remainder(total, weights):
    """Split `total` in proportion to `weights` (Hamilton method, ties to the first)."""
    weights = np.asarray(weights, dtype=float)
    quotas = total * weights / weights.sum()
    alloc = np.floor(quotas).astype(int)
    short = int(total - alloc.sum())
    order = np.argsort(-(quotas - alloc), kind='stable')
    alloc[order[:short]] += 1
    return alloc


def undersample(records, target_pos_frac=TARGET_POS_FRAC, seed=0, cell_deg=CELL_DEG):
    """
    Keep every positive and a geographically stratified sample of negatives.

    Negatives are drawn without replacement per lat/lon cell, in proportion
    to each cell's negative count, until they number
    round(positives * (1 - f) / f).

    Parameters
    ----------
    records : sequence of labeled HotspotRecord
    target_pos_frac : float
    seed : int
    cell_deg : float

    Returns
    -------
    list of HotspotRecord, in input order
    """
    if not 0 < target_pos_frac < 1:
        raise SamplingError(f'Target positive fraction must be in (0, 1), got {target_pos_frac}.')
    labels = _labels(records)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    if pos.size == 0:
        raise SamplingError('Cannot undersample without positive records.')

    n_neg = int(np.floor(pos.size * (1 - target_pos_frac) / target_pos_frac + 0.5))
    if neg.size < n_neg:
        warnings.warn(f'Only {neg.size} negatives available, {n_neg} required for a '
                      f'{100 * target_pos_frac:g}% positive fraction; keeping all records.',
                      UserWarning)
        return list(records)

    lat_i, lon_i = _cells([records[i] for i in neg], cell_deg)
    stratum, n_strata = _strata(lat_i, lon_i)
    alloc = largest_remainder(n_neg, np.bincount(stratum, minlength=n_strata))

    rng = np.random.default_rng(seed)
    chosen = [pos]
    for s in range(n_strata):
        members = neg[stratum == s]
        chosen.append(rng.choice(members, size=alloc[s], replace=False))
    keep = np.sort(np.concatenate(chosen))
    return [records[i] for i in keep]


def filter_by_time(records, start=S3_AVAILABLE_FROM, end=None):
    """Records with start <= time <= end; bounds are UTC seconds or ISO strings."""
    to_seconds = lambda t: parse_datetime(t) if isinstance(t, str) else float(t)
    lo = -np.inf if start is None else to_seconds(start)
    hi = np.inf if end is None else to_seconds(end)
    return [r for r in records if lo <= r.time <= hi]


def stratified_subsample(records, n, seed=0, cell_deg=CELL_DEG):
    """
    Draw `n` records preserving the (cell x label) distribution.

    Stratum quotas use the largest remainder method; the result keeps the
    input order.
    """
    if n >= len(records):
        return list(records)
    labels = _labels(records)
    lat_i, lon_i = _cells(records, cell_deg)
    stratum, n_strata = _strata(lat_i, lon_i, labels)
    alloc = largest_remainder(n, np.bincount(stratum, minlength=n_strata))
    rng = np.random.default_rng(seed)
    chosen = [rng.choice(np.flatnonzero(stratum == s), size=alloc[s], replace=False)
              for s in range(n_strata)]
    keep = np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=int)
    return [records[i] for i in keep]


def role_counts(n_splits):
    """Number of train/val/test splits; 28/14/8 for 50 splits."""
    if n_splits < 3:
        raise SamplingError(f'At least 3 splits are needed, got {n_splits}.')
    total = sum(ROLE_SPLITS.values())
    n_train = max(1, int(round(n_splits * ROLE_SPLITS['train'] / total)))
    n_val = max(1, int(round(n_splits * ROLE_SPLITS['val'] / total)))
    n_train = min(n_train, n_splits - 2)
    n_val = min(n_val, n_splits - n_train - 1)
    return n_train, n_val, n_splits - n_train - n_val


@dataclass
class SplitAssignment:
    """Split index of every record. Splits [0, n_train) train, then val, then test."""
    ids: np.ndarray
    split: np.ndarray
    n_splits: int = N_SPLITS
    seed: int = 0

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.uint64)
        self.split = np.asarray(self.split, dtype=int)

    def role_of_split(self, k):
        n_train, n_val, _ = role_counts(self.n_splits)
        if k < n_train:
            return 'train'
        if k < n_train + n_val:
            return 'val'
        return 'test'

    @property
    def roles(self):
        lookup = np.array([self.role_of_split(k) for k in range(self.n_splits)])
        return lookup[self.split]

    def mask(self, role):
        if role not in ROLES:
            raise ValueError(f'Unknown role {role}.')
        return self.roles == role

    def ids_for(self, role):
        return self.ids[self.mask(role)]

    def to_frame(self):
        return pd.DataFrame({'id': self.ids, 'split': self.split, 'role': self.roles})

    def write_csv(self, filename):
        self.to_frame().to_csv(filename, index=False)

    @classmethod
    def from_csv(cls, filename, n_splits=N_SPLITS, seed=0):
        df = pd.read_csv(filename, dtype={'id': 'uint64', 'split': int, 'role': str})
        out = cls(df['id'].to_numpy(), df['split'].to_numpy(), n_splits=n_splits, seed=seed)
        if len(df) and not np.array_equal(out.roles, df['role'].to_numpy()):
            raise SamplingError(f'{filename}: roles inconsistent with split indices.')
        return out


def make_splits(records, n_splits=N_SPLITS, seed=0, cell_deg=CELL_DEG):
    """
    Assign records to `n_splits` splits, stratified by (cell x label).

    Within each stratum records are shuffled and dealt round-robin; the
    dealing pointer carries over between strata. Split numbers are then
    permuted by the seed, so role membership is seed dependent.

    Returns
    -------
    SplitAssignment
    """
    role_counts(n_splits)
    labels = _labels(records)
    lat_i, lon_i = _cells(records, cell_deg)
    stratum, n_strata = _strata(lat_i, lon_i, labels)

    rng = np.random.default_rng(seed)
    bucket = np.zeros(len(records), dtype=int)
    pointer = 0
    for s in range(n_strata):
        members = rng.permutation(np.flatnonzero(stratum == s))
        bucket[members] = (pointer + np.arange(members.size)) % n_splits
        pointer = (pointer + members.size) % n_splits

    relabel = np.empty(n_splits, dtype=int)
    relabel[rng.permutation(n_splits)] = np.arange(n_splits)
    ids = np.array([r.id for r in records], dtype=np.uint64)
    return SplitAssignment(ids, relabel[bucket], n_splits=n_splits, seed=seed)
