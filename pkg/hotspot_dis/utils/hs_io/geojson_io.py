#!/usr/bin/env python

# geojson_io.py - Burned area FeatureCollection reading and writing

import datetime
import json
import warnings

from hotspot_dis.core.geo import PolygonGeom, TimeInterval, AntimeridianError
from hotspot_dis.core.records import BurnedAreaRecord, day_start
from hotspot_dis.utils.constants import MIN_BURNED_AREA_HA, SECONDS_PER_DAY


class BurnedAreaFormatError(ValueError):
    pass


def readJSON(filename):
    with open(filename, 'r') as jsonFile:
        return json.load(jsonFile)


def writeJSON(filename, obj):
    with open(filename, 'w') as jsonFile:
        json.dump(obj, jsonFile, indent='\t')


def _parse_geometry(geom, fid):
    try:
        gtype = geom['type']
        coords = geom['coordinates']
        if gtype == 'Polygon':
            parts = [coords]
        elif gtype == 'MultiPolygon':
            parts = coords
        else:
            raise BurnedAreaFormatError(f'Burned area {fid}: unsupported geometry {gtype}.')
        return tuple(PolygonGeom.from_lonlat(p[0], p[1:]) for p in parts)
    except (BurnedAreaFormatError, AntimeridianError):
        raise
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise BurnedAreaFormatError(f'Burned area {fid}: malformed geometry ({e}).')


def read_burned_areas(filename):
    """
    Read burned areas from a GeoJSON FeatureCollection.

    Dates are whole UTC days: start_date from 00:00:00, end_date until 23:59:59.
    Features below the 30 ha floor are skipped with a warning.

    Parameters
    ----------
    filename : str

    Returns
    -------
    list of BurnedAreaRecord
    """
    data = readJSON(filename)
    if not isinstance(data, dict) or data.get('type') != 'FeatureCollection':
        raise BurnedAreaFormatError(f'{filename} is not a GeoJSON FeatureCollection.')

    areas = []
    for feat in data.get('features', []):
        props = feat.get('properties') or {}
        try:
            fid = str(props['id'])
            start = datetime.date.fromisoformat(props['start_date'])
            end = datetime.date.fromisoformat(props['end_date'])
            area_ha = float(props['area_ha'])
        except (KeyError, TypeError, ValueError) as e:
            raise BurnedAreaFormatError(f'{filename}: bad feature properties {props} ({e}).')
        if end < start:
            raise BurnedAreaFormatError(f'Burned area {fid}: end date {end} before start {start}.')
        if area_ha < MIN_BURNED_AREA_HA:
            warnings.warn(f'Burned area {fid} skipped: {area_ha} ha is below the '
                          f'{MIN_BURNED_AREA_HA} ha minimum.', UserWarning)
            continue
        geometry = _parse_geometry(feat.get('geometry') or {}, fid)
        estimated = props.get('estimated_end')
        reported = TimeInterval(day_start(start), day_start(end) + SECONDS_PER_DAY - 1)
        areas.append(BurnedAreaRecord(id=fid,
                                      geometry=geometry,
                                      reported=reported,
                                      area_ha=area_ha,
                                      estimated_end=datetime.date.fromisoformat(estimated)
                                      if estimated else None))
    return areas


def _close(ring):
    return ring + [ring[0]]


def write_burned_areas(filename, areas):
    """Write burned areas as a FeatureCollection (rings explicitly closed)."""
    features = []
    for a in areas:
        polys = [[_close(r) for r in poly.to_lonlat()] for poly in a.geometry]
        if len(polys) == 1:
            geometry = {'type': 'Polygon', 'coordinates': polys[0]}
        else:
            geometry = {'type': 'MultiPolygon', 'coordinates': polys}
        props = {'id': a.id,
                 'start_date': a.start_date.isoformat(),
                 'end_date': a.end_date.isoformat(),
                 'area_ha': a.area_ha}
        if a.estimated_end is not None:
            props['estimated_end'] = a.estimated_end.isoformat()
        features.append({'type': 'Feature', 'properties': props, 'geometry': geometry})
    writeJSON(filename, {'type': 'FeatureCollection', 'features': features})
