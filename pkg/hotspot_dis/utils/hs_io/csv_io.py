#!/usr/bin/env python

# csv_io.py - Hotspot CSV reading and writing

import datetime
import warnings

import numpy as np
import pandas as pd

from hotspot_dis.core.geo import GeoPoint
from hotspot_dis.core.records import HotspotRecord
from hotspot_dis.utils.constants import HOTSPOT_CSV_COLUMNS, HOTSPOT_CSV_MANDATORY, \
    BANDS, DATETIME_FORMAT


class HotspotFormatError(ValueError):
    pass


def parse_datetime(text):
    """ISO-8601 UTC string (YYYY-MM-DDThh:mm:ssZ) to UTC seconds."""
    dt = datetime.datetime.strptime(text.strip(), DATETIME_FORMAT)
    return float(dt.replace(tzinfo=datetime.timezone.utc).timestamp())


def format_datetime(t):
    return datetime.datetime.fromtimestamp(float(t), tz=datetime.timezone.utc)\
        .strftime(DATETIME_FORMAT)


def _optional_float(text):
    text = text.strip()
    if text == '':
        return None
    val = float(text)
    if not np.isfinite(val):
        raise ValueError(f'non-finite value {text!r}')
    return val


def _parse_row(row, columns):
    bands = {}
    for b in BANDS:
        if b in columns:
            val = _optional_float(row[b])
            if val is not None:
                bands[b] = val
    label = None
    if 'label' in columns and row['label'].strip() != '':
        label = int(row['label'])
    point = GeoPoint(float(row['latitude']), float(row['longitude']))
    return HotspotRecord(id=int(row['id']),
                         point=point,
                         time=parse_datetime(row['acq_datetime']),
                         sensor=row['sensor'].strip(),
                         frp=_optional_float(row['frp']) if 'frp' in columns else None,
                         bands=bands,
                         confidence=_optional_float(row['confidence'])
                         if 'confidence' in columns else None,
                         label=label)


def read_hotspot_csv(filename, strict=False):
    """
    Read a hotspot CSV file.

    Parameters
    ----------
    filename : str
    strict : bool
        If True an invalid row raises HotspotFormatError, otherwise invalid
        rows are dropped and reported in a single warning.

    Returns
    -------
    list of HotspotRecord
    """
    try:
        df = pd.read_csv(filename, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise HotspotFormatError(f'{filename} has no header row.')

    columns = set(df.columns)
    missing = [c for c in HOTSPOT_CSV_MANDATORY if c not in columns]
    if missing:
        raise HotspotFormatError(f'{filename} is missing mandatory column(s) {missing}.')

    records = []
    rejected = []
    # File line numbers: the header is line 1
    for line, row in zip(range(2, len(df) + 2), df.to_dict('records')):
        try:
            records.append(_parse_row(row, columns))
        except (ValueError, TypeError) as e:
            rejected.append(f'line {line}: {e}')

    if rejected:
        msg = f'Rejected {len(rejected)} row(s) of {filename}: ' + '; '.join(rejected)
        if strict:
            raise HotspotFormatError(msg)
        warnings.warn(msg, UserWarning)
    return records


def _fmt(val):
    return '' if val is None else repr(float(val))


def hotspots_to_frame(records, with_label=None):
    """Hotspot records as a string-valued DataFrame in CSV column order."""
    if with_label is None:
        with_label = any(r.label is not None for r in records)
    columns = list(HOTSPOT_CSV_COLUMNS) + (['label'] if with_label else [])
    rows = []
    for r in records:
        row = {'id': str(r.id),
               'latitude': _fmt(r.point.lat),
               'longitude': _fmt(r.point.lon),
               'acq_datetime': format_datetime(r.time),
               'sensor': r.sensor.value,
               'confidence': _fmt(r.confidence),
               'frp': _fmt(r.frp)}
        for b in BANDS:
            row[b] = _fmt(r.bands.get(b))
        if with_label:
            row['label'] = '' if r.label is None else str(r.label)
        rows.append(row)
    return pd.DataFrame(rows, columns=columns)


def write_hotspot_csv(filename, records, with_label=None):
    """Write hotspots; a `label` column is added when any record is labeled."""
    hotspots_to_frame(records, with_label=with_label).to_csv(filename, index=False)
