#!/usr/bin/env python

# report.py - HTML report of an experiment run

import os.path as op

from jinja2 import FileSystemLoader, Environment, select_autoescape

from hotspot_dis.utils.experiment import load_report

templatePath = op.join(op.dirname(__file__), 'templates')
TABLE_COLUMNS = ('Feature set', 'Model', 'Val F1', 'Test F1', 'Val P', 'Val R',
                 'Test P', 'Test R')


def render_report(report):
    """HTML text of an ExperimentReport."""
    env = Environment(loader=FileSystemLoader(searchpath=templatePath),
                      autoescape=select_autoescape(['html']))
    base_template = env.get_template('report.html')
    header_template = env.get_template('header_section.html')
    results_template = env.get_template('results_section.html')

    info = [('Name', report.name),
            ('Timestamp', report.timestamp),
            ('Seed', report.seed),
            ('Config hash', report.config_hash),
            ('Dataset fingerprint', report.dataset_fingerprint),
            ('Wall clock (s)', f'{report.wall_clock_s:.1f}')]
    info += [(k.replace('_', ' ').capitalize(), v) for k, v in report.dataset.items()]

    rows = report.to_frame().to_dict(orient='records')
    for row in rows:
        row['baseline'] = report.baseline is not None \
            and row['featureset'] == report.baseline['featureset'] \
            and row['model'] == report.baseline['model']

    sections = [header_template.render(info=info),
                results_template.render(columns=TABLE_COLUMNS, rows=rows,
                                        baseline=report.baseline)]
    return base_template.render(title=f'Report for {report.name}', sections=sections)


def write_report(run_dir, outfile=None):
    """Render report.json of a run directory into report.html."""
    outfile = op.join(run_dir, 'report.html') if outfile is None else outfile
    report = load_report(run_dir)
    with open(outfile, 'w') as f:
        f.write(render_report(report))
    return outfile, report
