#!/usr/bin/env python

# experiment.py - Feature set x model ablation runs and their reports

import datetime
import json
import os
import time
from dataclasses import dataclass, field, asdict
from typing import List, Optional

import numpy as np
import pandas as pd

from hotspot_dis.core.geo import build_st_index
from hotspot_dis.utils.config import ExperimentConfig, ConfigError, PATCH_MODELS
from hotspot_dis.utils.features import FeatureSetConfig, MissingInputError, \
    build_feature_matrix, compute_nph_batch
from hotspot_dis.utils.hs_io import read_hotspot_csv, read_burned_areas, read_patch_store
from hotspot_dis.utils.labeling import label_campaign, apply_labels
from hotspot_dis.utils.metrics import compute_metrics, threshold
from hotspot_dis.utils.misc import file_digest, config_hash
from hotspot_dis.utils.sampling import undersample, make_splits, SplitAssignment
from hotspot_dis.utils.classifiers import fit_tabular, save_model, predict_proba
from hotspot_dis.utils.patchnet import train_patch_net

TABULAR_BLOCKS = FeatureSetConfig(name='tabular', modis_viirs=True, time=True, nph=True)
TIMESTAMP_FORMAT = '%Y%m%dT%H%M%SZ'
REPORT_COLUMNS = ['featureset', 'model', 'val_f1', 'test_f1', 'val_precision', 'val_recall',
                  'test_precision', 'test_recall', 'n_train', 'n_val', 'n_test', 'model_file']


@dataclass
class CellResult:
    featureset: str
    model: str
    model_file: str
    n_train: int
    n_val: int
    n_test: int
    val: dict
    test: dict


@dataclass
class ExperimentReport:
    """Results of a run. Ratios are in [0, 1]; the CSV reports them x100."""
    name: str
    seed: int
    config_hash: str
    dataset_fingerprint: str
    config: dict
    dataset: dict = field(default_factory=dict)
    cells: List[CellResult] = field(default_factory=list)
    baseline: Optional[dict] = None
    timestamp: str = ''
    wall_clock_s: float = 0.0

    def to_dict(self):
        return asdict(self)

    def to_frame(self):
        rows = []
        for c in self.cells:
            rows.append({'featureset': c.featureset, 'model': c.model,
                         'val_f1': 100 * c.val['f1'], 'test_f1': 100 * c.test['f1'],
                         'val_precision': 100 * c.val['precision'],
                         'val_recall': 100 * c.val['recall'],
                         'test_precision': 100 * c.test['precision'],
                         'test_recall': 100 * c.test['recall'],
                         'n_train': c.n_train, 'n_val': c.n_val, 'n_test': c.n_test,
                         'model_file': c.model_file})
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    def cell(self, featureset, model):
        for c in self.cells:
            if c.featureset == featureset and c.model == model:
                return c
        raise KeyError(f'No cell {featureset} x {model}.')

    def write(self, run_dir):
        with open(os.path.join(run_dir, 'report.json'), 'w') as fp:
            json.dump(self.to_dict(), fp, indent='\t')
        self.to_frame().to_csv(os.path.join(run_dir, 'report.csv'), index=False,
                               float_format='%.2f')

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d['cells'] = [CellResult(**c) for c in d.get('cells', [])]
        return cls(**d)


def load_report(run_dir):
    with open(os.path.join(run_dir, 'report.json'), 'r') as fp:
        return ExperimentReport.from_dict(json.load(fp))


def select_baseline(cells):
    """Cell with the best validation F1; ties go to the earliest cell."""
    if not cells:
        return None
    best = max(range(len(cells)), key=lambda i: (cells[i].val['f1'], -i))
    c = cells[best]
    return {'featureset': c.featureset, 'model': c.model, 'val_f1': c.val['f1']}


def dataset_fingerprint(cfg):
    paths = [p for p in (cfg.hotspots, cfg.areas, cfg.patches, cfg.splits) if p is not None]
    return file_digest(paths)


def model_filename(fs_idx, fs, m_idx, spec):
    """Run-relative model path; the config indices keep repeated names apart."""
    return os.path.join('models', f'{fs_idx}_{fs.name}_{m_idx}_{spec.type}.json')


def run_directory(out_dir, cfg_hash, now=None):
    now = datetime.datetime.now(datetime.timezone.utc) if now is None else now
    run_dir = os.path.join(out_dir, 'runs', f'{now.strftime(TIMESTAMP_FORMAT)}-{cfg_hash}')
    os.makedirs(os.path.join(run_dir, 'models'), exist_ok=True)
    return run_dir, now


class Dataset(object):
    """Labeled, undersampled, split records with the inputs their features need."""

    def __init__(self, cfg, verbose=False):
        self.cfg = cfg
        all_hotspots = read_hotspot_csv(cfg.hotspots)
        if any(h.label is None for h in all_hotspots):
            if cfg.areas is None:
                raise MissingInputError(f'{cfg.hotspots} has unlabeled records and no '
                                        '"data.areas" to label them.')
            _, report = label_campaign(all_hotspots, read_burned_areas(cfg.areas), verbose)
            all_hotspots = apply_labels(all_hotspots, report)
        self.all_hotspots = all_hotspots

        if cfg.splits is not None:
            self.splits = SplitAssignment.from_csv(cfg.splits, n_splits=cfg.n_splits,
                                                   seed=cfg.seed)
            by_id = {h.id: h for h in all_hotspots}
            missing = [int(i) for i in self.splits.ids if int(i) not in by_id]
            if missing:
                raise MissingInputError(f'Split ids not among the hotspots: {missing[:5]}.')
            self.records = [by_id[int(i)] for i in self.splits.ids]
        else:
            records = all_hotspots
            if cfg.undersample:
                records = undersample(records, cfg.target_pos_frac, cfg.seed, cfg.cell_deg)
            self.records = records
            self.splits = make_splits(records, cfg.n_splits, cfg.seed, cfg.cell_deg)
        self.y = np.array([h.label for h in self.records], dtype=int)

        self.patches = None
        if cfg.needs_patches:
            self.patches = {p.hotspot_id: p for p in read_patch_store(cfg.patches)}
        self._nph = None
        if verbose:
            print(f'{len(self.records)} records ({int(self.y.sum())} positive) '
                  f'from {len(all_hotspots)} hotspots.')

    @property
    def nph(self):
        """NPH counts of the kept records, searched over the full hotspot archive."""
        if self._nph is None:
            idx = build_st_index(self.all_hotspots)
            counts = compute_nph_batch(idx, self.records)
            self._nph = {h.id: tuple(c) for h, c in zip(self.records, counts)}
        return self._nph

    def features(self, fs):
        nph = self.nph if fs.nph else None
        return build_feature_matrix(self.records, fs, self.patches, nph).to_numpy()

    def patch_array(self):
        try:
            return np.stack([self.patches[h.id].values for h in self.records])
        except KeyError as exc:
            raise MissingInputError(f'No patch for hotspot {exc.args[0]}.') from exc

    def summary(self):
        roles = self.splits.roles
        return {'n_hotspots': len(self.all_hotspots),
                'n_records': len(self.records),
                'n_positive': int(self.y.sum()),
                'n_train': int(np.sum(roles == 'train')),
                'n_val': int(np.sum(roles == 'val')),
                'n_test': int(np.sum(roles == 'test'))}


def _fit_cell(ds, fs, spec, seed, verbose):
    """Train one cell on the train split; returns the model and val/test probabilities."""
    tr = ds.splits.mask('train')
    masks = {r: ds.splits.mask(r) for r in ('val', 'test')}
    if spec.type in PATCH_MODELS:
        x = ds.patch_array()
        tab = ds.features(TABULAR_BLOCKS) if spec.type == 'fusion_net' else None
        ids = np.array([h.id for h in ds.records], dtype=np.uint64)
        model = train_patch_net(x[tr], ds.y[tr], None if tab is None else tab[tr],
                                spec.train_config(seed), ids=ids[tr], verbose=verbose)
        proba = {r: model.predict_proba(x[m], None if tab is None else tab[m])
                 if m.any() else np.zeros(0) for r, m in masks.items()}
        return model, proba
    X = ds.features(fs)
    model = fit_tabular(spec.type, X[tr], ds.y[tr], spec.hyperparameters, seed, verbose)
    proba = {r: predict_proba(model, X[m]) for r, m in masks.items()}
    return model, proba


def run_experiment(cfg, out_dir, verbose=False, now=None):
    """
    Run every (feature set, model) cell of an experiment.

    Each model is fitted on the train split and scored on the validation and
    test splits at a 0.5 threshold. Models go to ``models/`` of the run
    directory ``<out_dir>/runs/<timestamp>-<confighash>/`` together with
    ``config.json``, ``report.json`` and ``report.csv``.

    Parameters
    ----------
    cfg : ExperimentConfig
    out_dir : str
    verbose : bool
    now : datetime, optional; fixes the run timestamp

    Returns
    -------
    ExperimentReport, run directory
    """
    if not isinstance(cfg, ExperimentConfig):
        raise ConfigError('run_experiment needs a parsed ExperimentConfig.')
    t0 = time.perf_counter()
    cfg_hash = config_hash(cfg.raw)
    run_dir, now = run_directory(out_dir, cfg_hash, now)
    with open(os.path.join(run_dir, 'config.json'), 'w') as fp:
        json.dump(cfg.raw, fp, indent='\t')

    report = ExperimentReport(name=cfg.name, seed=cfg.seed, config_hash=cfg_hash,
                              dataset_fingerprint=dataset_fingerprint(cfg), config=cfg.raw,
                              timestamp=now.strftime(TIMESTAMP_FORMAT))
    cells = cfg.indexed_cells()
    if cells:
        ds = Dataset(cfg, verbose)
        report.dataset = ds.summary()
        y_role = {r: ds.y[ds.splits.mask(r)] for r in ('val', 'test')}
        for fs_idx, fs, m_idx, spec in cells:
            if verbose:
                print(f'Training {spec.type} on {fs.name}')
            model, proba = _fit_cell(ds, fs, spec, cfg.seed, verbose)
            model_file = model_filename(fs_idx, fs, m_idx, spec)
            save_model(model, os.path.join(run_dir, model_file))
            scores = {r: compute_metrics(y_role[r], threshold(proba[r])).to_dict()
                      for r in ('val', 'test')}
            report.cells.append(CellResult(fs.name, spec.type, model_file,
                                           int(ds.splits.mask('train').sum()),
                                           int(y_role['val'].size), int(y_role['test'].size),
                                           scores['val'], scores['test']))
            if verbose:
                print(f'  val F1 {100 * scores["val"]["f1"]:.2f}, '
                      f'test F1 {100 * scores["test"]["f1"]:.2f}')
    report.baseline = select_baseline(report.cells)
    report.wall_clock_s = time.perf_counter() - t0
    report.write(run_dir)
    return report, run_dir


def evaluate_model(model, X, y, patches=None, tabular=None):
    """Metrics of a saved model on features X (tabular) or patches (patch nets)."""
    if model.model_type in PATCH_MODELS:
        if patches is None:
            raise MissingInputError(f'{model.model_type} needs patches to evaluate.')
        proba = model.predict_proba(patches, tabular) if len(y) else np.zeros(0)
    else:
        proba = predict_proba(model, X)
    return compute_metrics(y, threshold(proba))
