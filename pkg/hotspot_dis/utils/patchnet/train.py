#!/usr/bin/env python

# train.py - Minibatch training of the patch networks

from dataclasses import dataclass, asdict, fields

import numpy as np

from hotspot_dis.utils.misc import class_weights, bce_with_logits
from hotspot_dis.utils.classifiers.optim import AdamW, check_finite_loss
from hotspot_dis.utils.classifiers.standardize import Standardizer
from hotspot_dis.utils.patchnet.nets import PatchCNN, FusionNet, TRUNK_PARAMS, as_batch
from hotspot_dis.utils.patchnet.normalizer import PatchNormalizer


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 128
    lr: float = 1e-3
    weight_decay: float = 1e-2
    class_weight: float = 1.0
    seed: int = 0
    freeze_trunk: bool = False
    zero_init_head: bool = False
    dtype: str = 'float32'

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1 or self.lr <= 0 or self.weight_decay < 0 \
                or self.class_weight <= 0:
            raise ValueError(f'Invalid training configuration {asdict(self)}.')
        if self.dtype not in ('float32', 'float64'):
            raise ValueError(f'dtype must be float32 or float64, got {self.dtype}.')

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f'Unknown training options {sorted(unknown)}.')
        return cls(**d)

    def to_dict(self):
        return asdict(self)


def _unpack(patches, ids):
    """Patch values and ids from RasterPatch objects or a plain array."""
    if len(patches) and hasattr(patches[0], 'hotspot_id'):
        if ids is None:
            ids = [p.hotspot_id for p in patches]
        patches = np.stack([p.values for p in patches])
    return np.asarray(patches, dtype=np.float32), ids


def _batches(net, x, tab, sel):
    xb = net.normalizer.transform(x[sel]).astype(net.dtype)
    tb = None
    if tab is not None:
        tb = net.tabular_standardizer.transform(tab[sel])
    return xb, tb


def evaluate_loss(net, patches, y, tabular=None, batch_size=256):
    """Mean BCE of raw patches under a trained network."""
    x, _ = _unpack(patches, None)
    y = np.asarray(y, dtype=float)
    total = 0.0
    for start in range(0, y.size, batch_size):
        sel = np.arange(start, min(start + batch_size, y.size))
        xb, tb = _batches(net, x, None if tabular is None else np.asarray(tabular, float), sel)
        z, _ = net.logits(xb, tb)
        total += bce_with_logits(z, y[sel]) * sel.size
    return total / max(y.size, 1)


def train_patch_net(patches, y, tabular=None, cfg=None, ids=None, val=None, verbose=False):
    """
    Train a PatchCNN (no tabular input) or a FusionNet.

    Samples are first put in canonical order (ascending hotspot id when ids
    are known) so the result does not depend on the input order; batches
    then follow a seeded permutation per epoch.

    Parameters
    ----------
    patches : sequence of RasterPatch or array (N, 32, 32, 33), raw values
    y : array-like of 0/1
    tabular : array (N, 21), optional
        Sensor, time and NPH features; selects the FusionNet.
    cfg : TrainConfig
    ids : hotspot ids, optional
    val : (patches, y) or (patches, y, tabular), optional
        Validation data whose loss is logged each epoch.

    Returns
    -------
    PatchCNN or FusionNet, with a `history` dict of per-epoch losses

    Raises
    ------
    TrainingDivergedError if the loss becomes non-finite
    """
    cfg = TrainConfig() if cfg is None else cfg
    x, ids = _unpack(patches, ids)
    x, _ = as_batch(x, np.float32)
    y = np.asarray(y, dtype=float)
    if y.shape != (x.shape[0],) or not np.all(np.isin(y, (0, 1))):
        raise ValueError('Labels must be a 0/1 vector with one entry per patch.')
    if x.shape[0] == 0:
        raise ValueError('Cannot train on an empty dataset.')
    tab = None if tabular is None else np.asarray(tabular, dtype=float)

    if ids is not None:
        order = np.argsort(np.asarray(ids, dtype=np.uint64), kind='stable')
        x, y = x[order], y[order]
        tab = None if tab is None else tab[order]

    Net = PatchCNN if tab is None else FusionNet
    net = Net(seed=cfg.seed, dtype=cfg.dtype, zero_init_head=cfg.zero_init_head,
              normalizer=PatchNormalizer().fit(x))
    net.config = cfg
    if tab is not None:
        net.tabular_standardizer = Standardizer().fit(tab)

    frozen = TRUNK_PARAMS if cfg.freeze_trunk else ()
    opt = AdamW(net.params, lr=cfg.lr, weight_decay=cfg.weight_decay, frozen=frozen)
    sw = class_weights(y, cfg.class_weight)
    rng = np.random.default_rng([cfg.seed, 1])
    net.history = {'train_loss': [], 'val_loss': []}
    n = y.size
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        total = 0.0
        for batch, start in enumerate(range(0, n, cfg.batch_size)):
            sel = perm[start:start + cfg.batch_size]
            xb, tb = _batches(net, x, tab, sel)
            loss, grads = net.loss_and_grads(xb, y[sel], tb, sw[sel])
            check_finite_loss(loss, epoch, batch)
            opt.step(net.params, grads)
            total += loss * sel.size
        net.history['train_loss'].append(total / n)
        if val is not None:
            net.history['val_loss'].append(evaluate_loss(net, *val))
        if verbose:
            msg = f'Epoch {epoch}: train loss {total / n:.5f}'
            if val is not None:
                msg += f', val loss {net.history["val_loss"][-1]:.5f}'
            print(msg)
    return net
