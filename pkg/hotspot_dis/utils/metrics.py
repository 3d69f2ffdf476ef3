#!/usr/bin/env python

# metrics.py - Confusion counts, precision, recall and F1

from dataclasses import dataclass, asdict

import numpy as np

from hotspot_dis.utils.constants import DECISION_THRESHOLD


@dataclass(frozen=True)
class Metrics:
    """Confusion counts and ratios in [0, 1]; `as_percent` scales ratios by 100."""
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float

    @property
    def n(self):
        return self.tp + self.fp + self.fn + self.tn

    def as_percent(self):
        return {'precision': 100 * self.precision, 'recall': 100 * self.recall,
                'f1': 100 * self.f1}

    def to_dict(self):
        return asdict(self)


def compute_metrics(y_true, y_pred):
    """
    Binary classification metrics.

    Precision (recall) is 0 when nothing is predicted (present) positive;
    F1 is 0 when precision + recall is 0.

    Parameters
    ----------
    y_true, y_pred : array-like of 0/1, same length

    Returns
    -------
    Metrics
    """
    y_true = np.asarray(y_true).astype(int).ravel()
    y_pred = np.asarray(y_pred).astype(int).ravel()
    if y_true.size != y_pred.size:
        raise ValueError(f'Length mismatch: {y_true.size} labels, {y_pred.size} predictions.')
    if not (np.all(np.isin(y_true, (0, 1))) and np.all(np.isin(y_pred, (0, 1)))):
        raise ValueError('Labels and predictions must be 0 or 1.')
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(tp, fp, fn, tn, precision, recall, f1)


def threshold(proba, cut=DECISION_THRESHOLD):
    """Hard labels: 1 where proba >= cut."""
    return (np.asarray(proba) >= cut).astype(int)
