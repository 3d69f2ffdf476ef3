#!/usr/bin/env python

# hotspot_dis.py - Command line interface: synthetic scenes, labeling, features,
#                  splits, training, evaluation, reports and density maps

import json
import os
import sys

import configargparse
import numpy as np
import pandas as pd

ENV_PREFIX = 'HOTSPOT_DIS_'


class HotspotDisParser(configargparse.ArgParser):
    """Usage errors exit with 1 like any other invalid input; 2 is kept for I/O errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f'{self.prog}: error: {message}\n')


def _common(sp):
    sp.add_argument('--config', type=str, metavar='<json>',
                    help='JSON configuration (experiment description, scene parameters)')
    sp.add_argument('--seed', type=int, default=None, help='random seed')
    sp.add_argument('--out', type=str, default='.', metavar='<dir>', help='output folder')
    sp.add_argument('--verbose', action='store_true', help='print progress')


def build_parser():
    p = HotspotDisParser(prog='hotspot_dis', auto_env_var_prefix=ENV_PREFIX,
                         description='Hotspot disambiguation: wildfire vs '
                                     'other heat sources')
    sub = p.add_subparsers(dest='command', metavar='<command>')
    sub.required = True
    parsers = {}

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, auto_env_var_prefix=ENV_PREFIX)
        _common(sp)
        sp.set_defaults(func=func)
        parsers[name] = sp
        return sp

    sp = add('synth', synth, 'generate a synthetic scene with known labels')
    sp.add_argument('--n-points', type=int, help='number of hotspots')
    sp.add_argument('--n-fires', type=int, help='number of burned areas')
    sp.add_argument('--positive-fraction', type=float, help='fraction of wildfire hotspots')
    sp.add_argument('--n-industrial', type=int, help='number of persistent industrial sites')
    sp.add_argument('--gap-fraction', type=float, help='fraction of missing OLCI pixels')
    sp.add_argument('--no-patches', action='store_true', help='skip the patch store')
    sp.add_argument('--benchmark', action='store_true',
                    help='start from the benchmark scene (fire-like industry, midday glint)')

    sp = add('label', label, 'label hotspots against burned areas')
    sp.add_argument('--hotspots', required=True, type=str, help='hotspot CSV')
    sp.add_argument('--areas', required=True, type=str, help='burned area GeoJSON')
    sp.add_argument('--strict', action='store_true', help='fail on any malformed CSV row')

    sp = add('features', features, 'compute a feature matrix')
    sp.add_argument('--hotspots', required=True, type=str, help='hotspot CSV (labeled)')
    sp.add_argument('--patches', type=str, help='patch store (.hspt)')
    sp.add_argument('--featureset', type=str, default=None, help='FS1..FS6 (default FS1)')

    sp = add('split', split, 'undersample and assign stratified splits')
    sp.add_argument('--hotspots', required=True, type=str, help='labeled hotspot CSV')
    sp.add_argument('--undersample', action='store_true', help='undersample negatives first')
    sp.add_argument('--target-pos-frac', type=float, default=None,
                    help='positive fraction after undersampling (default 0.10)')
    sp.add_argument('--n-splits', type=int, default=None, help='number of splits (default 50)')
    sp.add_argument('--cell-deg', type=float, default=None,
                    help='stratification cell size in degrees (default 1)')

    add('train', train, 'run an experiment described by --config')

    sp = add('eval', evaluate, 'evaluate a saved model on one split role')
    sp.add_argument('--model', required=True, type=str, help='model JSON')
    sp.add_argument('--features', required=True, type=str, help='features CSV')
    sp.add_argument('--splits', required=True, type=str, help='splits CSV')
    sp.add_argument('--role', default='test', choices=['train', 'val', 'test'])
    sp.add_argument('--n-splits', type=int, default=None, help='number of splits (default 50)')
    sp.add_argument('--patches', type=str, help='patch store, for patch networks')

    sp = add('report', report, 'render the HTML report of a run')
    sp.add_argument('--run', required=True, type=str, help='run directory')

    sp = add('density', density, 'hotspot density grid')
    sp.add_argument('--hotspots', required=True, type=str, help='hotspot CSV')
    sp.add_argument('--cell-deg', type=float, default=1.0, help='cell size in degrees')
    sp.add_argument('--positives-only', action='store_true', help='count wildfires only')
    return p, parsers


def _read_json(filename):
    if filename is None:
        return {}
    with open(filename, 'r') as fp:
        return json.load(fp)


def _seed(args, cfg=None):
    if args.seed is not None:
        return args.seed
    return (cfg or {}).get('seed', 0)


def synth(args):
    from dataclasses import asdict
    from hotspot_dis.utils.synthetic import SceneConfig, generate_synthetic_scene
    from hotspot_dis.utils.hs_io import write_scene

    cfg = _read_json(args.config)
    scene = dict(cfg.get('scene', {}))
    if args.benchmark:
        scene = {**asdict(SceneConfig.benchmark()), **scene}
    flags = {'n_points': args.n_points, 'n_fires': args.n_fires,
             'positive_fraction': args.positive_fraction, 'n_industrial': args.n_industrial,
             'gap_fraction': args.gap_fraction}
    scene.update({k: v for k, v in flags.items() if v is not None})
    if args.no_patches:
        scene['with_patches'] = False
    seed = _seed(args, cfg)
    hotspots, areas, patches, truth = generate_synthetic_scene(SceneConfig.from_dict(scene), seed)
    write_scene(args.out, hotspots, areas, patches if patches else None, truth)
    if args.verbose:
        print(f'{len(hotspots)} hotspots ({int(truth.labels.sum())} wildfire), '
              f'{len(areas)} burned areas written to {args.out}')


def label(args):
    from hotspot_dis.utils.hs_io import read_hotspot_csv, read_burned_areas, \
        write_hotspot_csv, write_burned_areas
    from hotspot_dis.utils.labeling import label_campaign, apply_labels

    hotspots = read_hotspot_csv(args.hotspots, strict=args.strict)
    areas = read_burned_areas(args.areas)
    dated, rep = label_campaign(hotspots, areas, verbose=args.verbose)
    write_hotspot_csv(os.path.join(args.out, 'labeled.csv'), apply_labels(hotspots, rep))
    write_burned_areas(os.path.join(args.out, 'burned_areas_dated.geojson'), dated)
    with open(os.path.join(args.out, 'label_summary.json'), 'w') as fp:
        json.dump(rep.summary(), fp, indent='\t')


def features(args):
    from hotspot_dis.utils.hs_io import read_hotspot_csv, read_patch_store
    from hotspot_dis.utils.features import FeatureSetConfig, feature_frame

    cfg = _read_json(args.config)
    spec = args.featureset or cfg.get('featureset', 'FS1')
    fs = FeatureSetConfig.from_spec(spec)
    hotspots = read_hotspot_csv(args.hotspots)
    patches = None
    if fs.needs_patch:
        if args.patches is None:
            raise ValueError(f'Feature set {fs.name} needs --patches.')
        patches = read_patch_store(args.patches)
    df = feature_frame(hotspots, fs, patches=patches)
    df.to_csv(os.path.join(args.out, 'features.csv'), float_format='%.17g')
    if args.verbose:
        print(f'{df.shape[0]} x {df.shape[1] - 1} feature matrix ({fs.name})')


def split(args):
    from hotspot_dis.utils.constants import TARGET_POS_FRAC, N_SPLITS, CELL_DEG
    from hotspot_dis.utils.hs_io import read_hotspot_csv
    from hotspot_dis.utils.sampling import undersample, make_splits

    cfg = _read_json(args.config)
    sampling = cfg.get('sampling', {})
    seed = _seed(args, cfg)
    frac = args.target_pos_frac or sampling.get('target_pos_frac', TARGET_POS_FRAC)
    n_splits = args.n_splits or sampling.get('n_splits', N_SPLITS)
    cell_deg = args.cell_deg or sampling.get('cell_deg', CELL_DEG)
    records = read_hotspot_csv(args.hotspots)
    if args.undersample or sampling.get('undersample', False):
        records = undersample(records, frac, seed, cell_deg)
        pd.DataFrame({'id': np.array([r.id for r in records], dtype=np.uint64)}).to_csv(
            os.path.join(args.out, 'undersampled.csv'), index=False)
    assignment = make_splits(records, n_splits, seed, cell_deg)
    assignment.write_csv(os.path.join(args.out, 'splits.csv'))
    if args.verbose:
        counts = pd.Series(assignment.roles).value_counts()
        print(f'{len(records)} records: ' +
              ', '.join(f'{r} {counts.get(r, 0)}' for r in ('train', 'val', 'test')))


def train(args):
    from hotspot_dis.utils.config import load_config
    from hotspot_dis.utils.experiment import run_experiment

    if args.config is None:
        raise ValueError('train needs --config <experiment json>.')
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.raw = dict(cfg.raw, seed=args.seed)
    rep, run_dir = run_experiment(cfg, args.out, verbose=args.verbose)
    print(f'Run directory: {run_dir}')
    if rep.cells:
        print(rep.to_frame()[['featureset', 'model', 'val_f1', 'test_f1']].to_string(
            index=False, float_format='%.2f'))


def evaluate(args):
    from hotspot_dis.utils.constants import N_SPLITS
    from hotspot_dis.utils.classifiers import load_model
    from hotspot_dis.utils.config import PATCH_MODELS
    from hotspot_dis.utils.experiment import evaluate_model, TABULAR_BLOCKS
    from hotspot_dis.utils.features import feature_names
    from hotspot_dis.utils.hs_io import read_patch_store
    from hotspot_dis.utils.sampling import SplitAssignment

    model = load_model(args.model)
    df = pd.read_csv(args.features, dtype={'id': 'uint64'}).set_index('id')
    splits = SplitAssignment.from_csv(args.splits, n_splits=args.n_splits or N_SPLITS)
    ids = splits.ids_for(args.role)
    missing = np.setdiff1d(ids, df.index.to_numpy())
    if missing.size:
        raise ValueError(f'{missing.size} split ids have no features, e.g. {missing[:3]}.')
    df = df.loc[ids]
    y = df.pop('label').to_numpy()
    if np.any(y < 0):
        raise ValueError('Features file has unlabeled records.')
    patches = tabular = None
    if model.model_type in PATCH_MODELS:
        if args.patches is None:
            raise ValueError(f'{model.model_type} needs --patches.')
        store = {p.hotspot_id: p.values for p in read_patch_store(args.patches)}
        no_patch = [int(i) for i in ids if int(i) not in store]
        if no_patch:
            raise ValueError(f'{len(no_patch)} hotspots have no patch in {args.patches}, '
                             f'e.g. {no_patch[:3]}.')
        patches = np.stack([store[int(i)] for i in ids]) if ids.size else None
        if model.model_type == 'fusion_net':
            tabular = df[feature_names(TABULAR_BLOCKS)].to_numpy()
    m = evaluate_model(model, df.to_numpy(), y, patches, tabular)
    out = dict(m.to_dict(), role=args.role, model=args.model, n=m.n)
    with open(os.path.join(args.out, 'metrics.json'), 'w') as fp:
        json.dump(out, fp, indent='\t')
    print(f'{args.role}: F1 {100 * m.f1:.2f} (precision {100 * m.precision:.2f}, '
          f'recall {100 * m.recall:.2f}, n={m.n})')


def report(args):
    from hotspot_dis.utils.report import write_report

    outfile, rep = write_report(args.run, os.path.join(args.out, 'report.html')
                                if args.out != '.' else None)
    if rep.cells:
        print(rep.to_frame()[['featureset', 'model', 'val_f1', 'test_f1']].to_string(
            index=False, float_format='%.2f'))
    print(f'Report written to {outfile}')


def density(args):
    from hotspot_dis.utils.hs_io import read_hotspot_csv
    from hotspot_dis.utils.density import density_grid

    hotspots = read_hotspot_csv(args.hotspots)
    if args.positives_only and any(h.label is None for h in hotspots):
        raise ValueError('--positives-only needs a labeled hotspot file.')
    grid = density_grid(hotspots, args.cell_deg, args.positives_only)
    grid.write_csv(os.path.join(args.out, 'density.csv'))
    grid.write_png(os.path.join(args.out, 'density.png'))
    if args.verbose:
        print(f'{grid.total} hotspots in {len(grid.table)} cells')


def main(argv=None):
    p, parsers = build_parser()
    args = p.parse_args(argv)
    if args.verbose:
        from hotspot_dis.utils.splash import splash
        splash()
    try:
        os.makedirs(args.out, exist_ok=True)
        # Save chosen arguments
        with open(os.path.join(args.out, 'options.txt'), 'w') as f:
            f.write(str(args))
            f.write('\n--------\n')
            f.write(parsers[args.command].format_values())
        args.func(args)
    except OSError as exc:
        print(f'hotspot_dis {args.command}: {exc}', file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f'hotspot_dis {args.command}: {exc}', file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
