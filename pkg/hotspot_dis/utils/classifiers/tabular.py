#!/usr/bin/env python

# tabular.py - Fit any tabular classifier from a model type and hyperparameter dict

from hotspot_dis.utils.classifiers.standardize import Standardizer
from hotspot_dis.utils.classifiers.logreg import LRParams, train_logreg
from hotspot_dis.utils.classifiers.mlp import MLPParams, train_mlp
from hotspot_dis.utils.classifiers.gbdt import GBDTParams, train_gbdt

# model type -> (hyperparameter class, trainer, needs standardized input)
TABULAR_MODELS = {'logreg': (LRParams, train_logreg, True),
                  'mlp': (MLPParams, train_mlp, True),
                  'gbdt': (GBDTParams, train_gbdt, False)}


def make_params(model_type, hp=None):
    if model_type not in TABULAR_MODELS:
        raise ValueError(f'Unknown tabular model {model_type}; '
                         f'choose from {sorted(TABULAR_MODELS)}.')
    cls = TABULAR_MODELS[model_type][0]
    hp = {} if hp is None else dict(hp)
    unknown = set(hp) - set(cls.__dataclass_fields__)
    if unknown:
        raise ValueError(f'Unknown {model_type} hyperparameters {sorted(unknown)}.')
    return cls(**hp)


def fit_tabular(model_type, X, y, hp=None, seed=0, verbose=False):
    """
    Train a tabular model on the train split.

    LR and MLP inputs are standardized with statistics of X; the fitted
    Standardizer is stored on the model and applied at prediction time.
    """
    params = make_params(model_type, hp)
    _, trainer, standardize = TABULAR_MODELS[model_type]
    if standardize:
        scaler = Standardizer().fit(X)
        model = trainer(scaler.transform(X), y, params, seed=seed, verbose=verbose)
        model.standardizer = scaler
        return model
    return trainer(X, y, params, seed=seed, verbose=verbose)
