#!/usr/bin/env python

# nets.py - Residual patch CNN and its fusion with tabular features
#
# PatchCNN:  stem conv(33->16) + relu | res block | avgpool 2x2 | res block
#            | global average pool -> 16-d embedding | linear 16->1
# FusionNet: same trunk | concat(embedding, tabular 21) | 37->32 relu | 32->1

import numpy as np

from hotspot_dis.utils.constants import PATCH_SIZE, PATCH_CHANNELS, EMBEDDING_DIM, \
    FUSION_HIDDEN, TABULAR_DIM
from hotspot_dis.utils.misc import sigmoid, bce_with_logits
from hotspot_dis.utils.patchnet.layers import conv3x3, conv3x3_backward, relu, avgpool2, \
    avgpool2_backward, global_avg_pool, global_avg_pool_backward, residual_block, \
    residual_block_backward

TRUNK_PARAMS = ('stem_W', 'stem_b',
                'block1_W1', 'block1_b1', 'block1_W2', 'block1_b2',
                'block2_W1', 'block2_b1', 'block2_W2', 'block2_b2')
CNN_HEAD_PARAMS = ('head_W', 'head_b')
FUSION_HEAD_PARAMS = ('fuse_W1', 'fuse_b1', 'fuse_W2', 'fuse_b2')


def _uniform(rng, fan_in, shape, dtype):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, shape).astype(dtype)


def init_trunk(rng, dtype):
    p = {}
    conv_in = {'stem': PATCH_CHANNELS, 'block1': EMBEDDING_DIM, 'block2': EMBEDDING_DIM}
    p['stem_W'] = _uniform(rng, 9 * PATCH_CHANNELS, (3, 3, PATCH_CHANNELS, EMBEDDING_DIM), dtype)
    p['stem_b'] = _uniform(rng, 9 * PATCH_CHANNELS, EMBEDDING_DIM, dtype)
    for blk in ('block1', 'block2'):
        for k in ('1', '2'):
            fan_in = 9 * conv_in[blk]
            p[f'{blk}_W{k}'] = _uniform(rng, fan_in, (3, 3, EMBEDDING_DIM, EMBEDDING_DIM), dtype)
            p[f'{blk}_b{k}'] = _uniform(rng, fan_in, EMBEDDING_DIM, dtype)
    return p


def trunk_forward(p, x):
    """Embedding of a normalized batch (N, 32, 32, 33) plus the backward cache."""
    a0 = relu(conv3x3(x, p['stem_W'], p['stem_b']))
    a1, c1 = residual_block(a0, p['block1_W1'], p['block1_b1'], p['block1_W2'], p['block1_b2'])
    pooled = avgpool2(a1)
    a2, c2 = residual_block(pooled, p['block2_W1'], p['block2_b1'], p['block2_W2'],
                            p['block2_b2'])
    return global_avg_pool(a2), (x, a0, c1, c2, a2.shape)


def trunk_backward(p, cache, de):
    x, a0, c1, c2, shape = cache
    g = {}
    da2 = global_avg_pool_backward(de, shape)
    dpool, g['block2_W1'], g['block2_b1'], g['block2_W2'], g['block2_b2'] = \
        residual_block_backward(da2, c2, p['block2_W1'], p['block2_W2'])
    da1 = avgpool2_backward(dpool)
    da0, g['block1_W1'], g['block1_b1'], g['block1_W2'], g['block1_b2'] = \
        residual_block_backward(da1, c1, p['block1_W1'], p['block1_W2'])
    dz0 = da0 * (a0 > 0)
    _, g['stem_W'], g['stem_b'] = conv3x3_backward(dz0, x, p['stem_W'])
    return g


def as_batch(patches, dtype):
    x = np.asarray(patches, dtype=dtype)
    single = x.ndim == 3
    if single:
        x = x[None]
    if x.ndim != 4 or x.shape[1:] != (PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS):
        raise ValueError(f'Patches must have shape (N, {PATCH_SIZE}, {PATCH_SIZE}, '
                         f'{PATCH_CHANNELS}), got {np.shape(patches)}.')
    return x, single


class PatchNet(object):
    """Common parameter handling, loss and gradients of both patch networks."""
    model_type = None
    head_params = ()

    def __init__(self, params=None, seed=0, dtype=np.float32, zero_init_head=False,
                 normalizer=None, tabular_standardizer=None):
        self.dtype = np.dtype(dtype)
        self.seed = seed
        self.normalizer = normalizer
        self.tabular_standardizer = tabular_standardizer
        self.config = None
        self.history = {}
        if params is None:
            rng = np.random.default_rng(seed)
            params = init_trunk(rng, self.dtype)
            params.update(self.init_head(rng))
            if zero_init_head:
                for k in self.head_params[-2:]:
                    params[k][:] = 0
        self.params = {k: np.asarray(v, dtype=self.dtype) for k, v in params.items()}

    @property
    def trunk_params(self):
        return TRUNK_PARAMS

    def n_parameters(self):
        return int(sum(v.size for v in self.params.values()))

    def logits(self, x, tabular=None):
        z, _, emb = self._forward(x, tabular)
        return z, emb

    def loss_and_grads(self, x, y, tabular=None, sample_weight=None):
        """Weighted mean BCE of a normalized batch and its gradient for every parameter."""
        y = np.asarray(y, dtype=float)
        w = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        z, cache, _ = self._forward(x, tabular)
        loss = bce_with_logits(z, y, w)
        dz = (w * (sigmoid(z) - y) / w.sum()).astype(self.dtype)
        return loss, self._backward(cache, dz)

    def predict_proba(self, patches, tabular=None):
        """Probabilities for raw (unnormalized) patches and tabular features."""
        if np.size(patches) == 0:
            return np.zeros(0)
        x, single = as_batch(patches, self.dtype)
        if self.normalizer is not None:
            x = self.normalizer.transform(x).astype(self.dtype)
        if tabular is not None:
            tabular = np.atleast_2d(np.asarray(tabular, dtype=float))
            if self.tabular_standardizer is not None:
                tabular = self.tabular_standardizer.transform(tabular)
        z, _ = self.logits(x, tabular)
        p = sigmoid(z.astype(float))
        return p[0] if single else p

    def to_dict(self):
        return {'hyperparameters': {} if self.config is None else self.config.to_dict(),
                'seed': self.seed,
                'dtype': self.dtype.name,
                'params': {k: {'shape': list(v.shape), 'values': v.ravel().tolist()}
                           for k, v in self.params.items()},
                'normalizer': None if self.normalizer is None else self.normalizer.to_dict(),
                'tabular_standardizer': None if self.tabular_standardizer is None
                else self.tabular_standardizer.to_dict()}


class PatchCNN(PatchNet):
    model_type = 'patch_cnn'
    head_params = CNN_HEAD_PARAMS

    def init_head(self, rng):
        return {'head_W': _uniform(rng, EMBEDDING_DIM, (EMBEDDING_DIM, 1), self.dtype),
                'head_b': _uniform(rng, EMBEDDING_DIM, 1, self.dtype)}

    def _forward(self, x, tabular=None):
        if tabular is not None:
            raise ValueError('PatchCNN takes no tabular input.')
        emb, cache = trunk_forward(self.params, x)
        z = (emb @ self.params['head_W'] + self.params['head_b'])[:, 0]
        return z, (cache, emb), emb

    def _backward(self, cache, dz):
        trunk_cache, emb = cache
        dz = dz[:, None]
        g = trunk_backward(self.params, trunk_cache, dz @ self.params['head_W'].T)
        g['head_W'] = emb.T @ dz
        g['head_b'] = dz.sum(axis=0)
        return g


class FusionNet(PatchNet):
    model_type = 'fusion_net'
    head_params = FUSION_HEAD_PARAMS

    def init_head(self, rng):
        fan_in = EMBEDDING_DIM + TABULAR_DIM
        return {'fuse_W1': _uniform(rng, fan_in, (fan_in, FUSION_HIDDEN), self.dtype),
                'fuse_b1': _uniform(rng, fan_in, FUSION_HIDDEN, self.dtype),
                'fuse_W2': _uniform(rng, FUSION_HIDDEN, (FUSION_HIDDEN, 1), self.dtype),
                'fuse_b2': _uniform(rng, FUSION_HIDDEN, 1, self.dtype)}

    def _forward(self, x, tabular=None):
        if tabular is None:
            raise ValueError('FusionNet needs tabular input.')
        tabular = np.asarray(tabular, dtype=self.dtype)
        if tabular.shape != (x.shape[0], TABULAR_DIM):
            raise ValueError(f'Tabular input must have shape ({x.shape[0]}, {TABULAR_DIM}), '
                             f'got {tabular.shape}.')
        emb, cache = trunk_forward(self.params, x)
        f = np.concatenate([emb, tabular], axis=1)
        hidden = relu(f @ self.params['fuse_W1'] + self.params['fuse_b1'])
        z = (hidden @ self.params['fuse_W2'] + self.params['fuse_b2'])[:, 0]
        return z, (cache, f, hidden), emb

    def _backward(self, cache, dz):
        trunk_cache, f, hidden = cache
        dz = dz[:, None]
        g = {'fuse_W2': hidden.T @ dz, 'fuse_b2': dz.sum(axis=0)}
        dh = (dz @ self.params['fuse_W2'].T) * (hidden > 0)
        g['fuse_W1'] = f.T @ dh
        g['fuse_b1'] = dh.sum(axis=0)
        df = dh @ self.params['fuse_W1'].T
        g.update(trunk_backward(self.params, trunk_cache, df[:, :EMBEDDING_DIM]))
        return g


NETS = {'patch_cnn': PatchCNN, 'fusion_net': FusionNet}


def forward(net, patch, tabular=None):
    """
    Probability and embedding of normalized patch(es).

    Parameters
    ----------
    net : PatchCNN or FusionNet
    patch : array-like, shape (32, 32, 33) or (N, 32, 32, 33), normalized
    tabular : array-like, shape (21,) or (N, 21), FusionNet only

    Returns
    -------
    probability : float or array of shape (N,)
    embedding : array of shape (16,) or (N, 16)
    """
    x, single = as_batch(patch, net.dtype)
    if tabular is not None:
        tabular = np.atleast_2d(tabular)
    z, emb = net.logits(x, tabular)
    p = sigmoid(z.astype(float))
    if single:
        return float(p[0]), emb[0]
    return p, emb


def net_from_dict(d):
    from hotspot_dis.utils.classifiers.standardize import Standardizer
    from hotspot_dis.utils.patchnet.normalizer import PatchNormalizer
    from hotspot_dis.utils.patchnet.train import TrainConfig

    dtype = np.dtype(d['dtype'])
    params = {k: np.asarray(v['values'], dtype=dtype).reshape(v['shape'])
              for k, v in d['params'].items()}
    normalizer = None if d.get('normalizer') is None \
        else PatchNormalizer.from_dict(d['normalizer'])
    tab = None if d.get('tabular_standardizer') is None \
        else Standardizer.from_dict(d['tabular_standardizer'])
    net = NETS[d['model_type']](params, seed=d['seed'], dtype=dtype, normalizer=normalizer,
                                tabular_standardizer=tab)
    if d.get('hyperparameters'):
        net.config = TrainConfig(**d['hyperparameters'])
    return net
