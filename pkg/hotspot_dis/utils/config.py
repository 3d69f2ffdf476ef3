#!/usr/bin/env python

# config.py - Experiment configuration parsing and validation
#
# {
#   "data": {"hotspots": "labeled.csv", "patches": "patches.hspt",
#            "splits": "splits.csv", "areas": "burned_areas.geojson"},
#   "featureset": "FS1" | {"modis_viirs": true, ...} | ["FS1", "FS3"],
#   "model": {"type": "gbdt", "max_depth": 6} | [{"type": "logreg"}, ...],
#   "sampling": {"undersample": true, "target_pos_frac": 0.1,
#                "n_splits": 50, "cell_deg": 1.0},
#   "seed": 0
# }

import json
import os
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

from hotspot_dis.utils.constants import TARGET_POS_FRAC, N_SPLITS, CELL_DEG
from hotspot_dis.utils.features import FeatureSetConfig
from hotspot_dis.utils.classifiers.tabular import TABULAR_MODELS, make_params
from hotspot_dis.utils.patchnet.train import TrainConfig

PATCH_MODELS = ('patch_cnn', 'fusion_net')
MODEL_TYPES = tuple(TABULAR_MODELS) + PATCH_MODELS
TOP_LEVEL_KEYS = {'data', 'featureset', 'model', 'sampling', 'seed', 'name'}
DATA_KEYS = {'hotspots', 'patches', 'splits', 'areas'}
SAMPLING_KEYS = {'undersample', 'target_pos_frac', 'n_splits', 'cell_deg'}


class ConfigError(ValueError):
    pass


@dataclass
class ModelSpec:
    type: str
    hyperparameters: dict = field(default_factory=dict)

    @property
    def label(self):
        return self.type

    def train_config(self, seed):
        hp = dict(self.hyperparameters)
        hp.setdefault('seed', seed)
        return TrainConfig.from_dict(hp)


def compatible(fs, model_type):
    """Whether a model can run on a feature set.

    patch_cnn sees the land cover and Sentinel-3 patch only; fusion_net
    needs every block.
    """
    if model_type == 'patch_cnn':
        return fs.blocks == ('land_cover', 'sentinel3')
    if model_type == 'fusion_net':
        return len(fs.blocks) == 5
    return True


@dataclass
class ExperimentConfig:
    hotspots: Optional[str] = None
    patches: Optional[str] = None
    splits: Optional[str] = None
    areas: Optional[str] = None
    featuresets: List[FeatureSetConfig] = field(default_factory=list)
    models: List[ModelSpec] = field(default_factory=list)
    undersample: bool = True
    target_pos_frac: float = TARGET_POS_FRAC
    n_splits: int = N_SPLITS
    cell_deg: float = CELL_DEG
    seed: int = 0
    name: str = 'experiment'
    raw: dict = field(default_factory=dict)

    def indexed_cells(self):
        """(feature set index, feature set, model index, model) of every cell to run."""
        return [(i, fs, j, m) for i, fs in enumerate(self.featuresets)
                for j, m in enumerate(self.models) if compatible(fs, m.type)]

    def cells(self):
        """(feature set, model) pairs to run, feature sets outermost."""
        return [(fs, m) for _, fs, _, m in self.indexed_cells()]

    @property
    def needs_patches(self):
        return any(fs.needs_patch for fs, _ in self.cells()) or \
            any(m.type in PATCH_MODELS for m in self.models)


def _as_list(x):
    return x if isinstance(x, list) else [x]


def _parse_model(entry):
    if isinstance(entry, str):
        entry = {'type': entry}
    if not isinstance(entry, dict) or 'type' not in entry:
        raise ConfigError(f'Model entries need a "type" field, got {entry!r}.')
    hp = {k: v for k, v in entry.items() if k != 'type'}
    mtype = entry['type']
    if mtype not in MODEL_TYPES:
        raise ConfigError(f'Unknown model type {mtype}; choose from {list(MODEL_TYPES)}.')
    try:
        if mtype in TABULAR_MODELS:
            make_params(mtype, hp)
        else:
            TrainConfig.from_dict(hp)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return ModelSpec(mtype, hp)


def parse_config(d, base_dir=None):
    """
    Validate an experiment description.

    Relative data paths are resolved against `base_dir`.

    Returns
    -------
    ExperimentConfig

    Raises
    ------
    ConfigError on any schema violation
    """
    if not isinstance(d, dict):
        raise ConfigError('Experiment configuration must be a JSON object.')
    unknown = set(d) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f'Unknown configuration keys {sorted(unknown)}.')

    data = d.get('data', {})
    if not isinstance(data, dict) or set(data) - DATA_KEYS:
        raise ConfigError(f'"data" must be an object with keys among {sorted(DATA_KEYS)}.')
    paths = {}
    for k in DATA_KEYS:
        p = data.get(k)
        if p is not None and base_dir is not None and not os.path.isabs(p):
            p = os.path.join(base_dir, p)
        paths[k] = p

    featuresets = []
    for spec in _as_list(d.get('featureset', [])):
        try:
            featuresets.append(FeatureSetConfig.from_spec(spec))
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
    models = [_parse_model(m) for m in _as_list(d.get('model', []))]

    sampling = d.get('sampling', {})
    if not isinstance(sampling, dict) or set(sampling) - SAMPLING_KEYS:
        raise ConfigError(f'"sampling" must be an object with keys among {sorted(SAMPLING_KEYS)}.')
    seed = d.get('seed', 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f'seed must be a non-negative integer, got {seed!r}.')

    cfg = ExperimentConfig(featuresets=featuresets, models=models, seed=seed,
                           name=d.get('name', 'experiment'), raw=d, **paths)
    cfg.undersample = bool(sampling.get('undersample', True))
    cfg.target_pos_frac = float(sampling.get('target_pos_frac', TARGET_POS_FRAC))
    cfg.n_splits = int(sampling.get('n_splits', N_SPLITS))
    cfg.cell_deg = float(sampling.get('cell_deg', CELL_DEG))
    if not 0 < cfg.target_pos_frac < 1 or cfg.n_splits < 3 or cfg.cell_deg <= 0:
        raise ConfigError('Invalid sampling settings.')

    for m in models:
        if m.type in PATCH_MODELS and not any(compatible(fs, m.type) for fs in featuresets):
            need = 'FS6 (land_cover + sentinel3)' if m.type == 'patch_cnn' else 'FS4'
            raise ConfigError(f'{m.type} needs feature set {need}.')
    skipped = [(fs.name, m.type) for fs in featuresets for m in models
               if not compatible(fs, m.type)]
    if skipped:
        warnings.warn(f'Skipping incompatible feature set / model pairs {skipped}.', UserWarning)

    if cfg.models and cfg.featuresets:
        if cfg.hotspots is None:
            raise ConfigError('"data.hotspots" is required.')
        if cfg.needs_patches and cfg.patches is None:
            raise ConfigError('The requested cells need "data.patches".')
    return cfg


def load_config(filename):
    with open(filename, 'r') as fp:
        try:
            d = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{filename} is not valid JSON: {exc}') from exc
    return parse_config(d, base_dir=os.path.dirname(os.path.abspath(filename)))
