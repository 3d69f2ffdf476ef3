#!/usr/bin/env python

# serialize.py - Shared model file format and inference entry point

import json

import numpy as np

from hotspot_dis.utils.constants import MODEL_FILE_VERSION
from hotspot_dis.utils.classifiers.standardize import Standardizer
from hotspot_dis.utils.classifiers.logreg import LRModel, LRParams
from hotspot_dis.utils.classifiers.mlp import MLPModel, MLPParams
from hotspot_dis.utils.classifiers.gbdt import GBDTModel, GBDTParams, Tree


class ModelFormatError(ValueError):
    pass


def _array(d):
    return np.asarray(d['values'], dtype=float).reshape(d['shape'])


def _standardizer(d):
    return None if d.get('standardizer') is None else Standardizer.from_dict(d['standardizer'])


def _load_logreg(d):
    p = d['params']
    return LRModel(p['weights'], p['bias'], LRParams(**d['hyperparameters']), d['seed'],
                   _standardizer(d))


def _load_mlp(d):
    layers = {k: _array(v) for k, v in d['params'].items()}
    return MLPModel(layers, MLPParams(**d['hyperparameters']), d['seed'], _standardizer(d))


def _load_gbdt(d):
    p = d['params']
    trees = [Tree.from_nested(t) for t in p['trees']]
    return GBDTModel(p['base_score'], trees, p['n_features'], GBDTParams(**d['hyperparameters']),
                     d['seed'])


def _load_patch_net(d):
    from hotspot_dis.utils.patchnet.nets import net_from_dict
    return net_from_dict(d)


LOADERS = {'logreg': _load_logreg,
           'mlp': _load_mlp,
           'gbdt': _load_gbdt,
           'patch_cnn': _load_patch_net,
           'fusion_net': _load_patch_net}


def model_to_dict(model):
    out = {'model_type': model.model_type, 'version': MODEL_FILE_VERSION}
    out.update(model.to_dict())
    return out


def model_from_dict(d):
    if not isinstance(d, dict) or 'model_type' not in d or 'version' not in d:
        raise ModelFormatError('Model description needs model_type and version fields.')
    if d['version'] != MODEL_FILE_VERSION:
        raise ModelFormatError(f'Unsupported model file version {d["version"]}.')
    if d['model_type'] not in LOADERS:
        raise ModelFormatError(f'Unknown model type {d["model_type"]}.')
    try:
        return LOADERS[d['model_type']](d)
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f'Malformed {d["model_type"]} model: {exc!r}') from exc


def save_model(model, filename):
    """Write a model as JSON."""
    with open(filename, 'w') as fp:
        json.dump(model_to_dict(model), fp, indent='\t')


def load_model(filename):
    with open(filename, 'r') as fp:
        try:
            d = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f'{filename} is not valid JSON: {exc}') from exc
    return model_from_dict(d)


def predict_proba(model, X):
    """
    Positive class probabilities of a tabular model.

    Parameters
    ----------
    model : LRModel, MLPModel or GBDTModel
    X : array-like, shape (n, d)

    Returns
    -------
    numpy.ndarray, shape (n,)
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros(0)
    if X.ndim == 1:
        X = X[None, :]
    return model.predict_proba(X)
