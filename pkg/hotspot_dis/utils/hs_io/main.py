#!/usr/bin/env python

# main.py - Scene folder I/O for hotspot_dis
#
# A scene folder holds the canonical file set of one campaign:
#   hotspots.csv, burned_areas.geojson, patches.hspt (+ sidecar), truth.csv

import os
from collections import namedtuple

import pandas as pd

from hotspot_dis.utils.hs_io.csv_io import read_hotspot_csv, write_hotspot_csv
from hotspot_dis.utils.hs_io.geojson_io import read_burned_areas, write_burned_areas
from hotspot_dis.utils.hs_io.patch_io import read_patch_store, write_patch_store

SCENE_FILES = {'hotspots': 'hotspots.csv',
               'areas': 'burned_areas.geojson',
               'patches': 'patches.hspt',
               'truth': 'truth.csv'}

Scene = namedtuple('Scene', ['hotspots', 'areas', 'patches', 'truth'])


def write_scene(folder, hotspots, areas, patches, truth=None):
    """Write a scene folder. `truth` is a SyntheticTruth; `patches` None skips the store."""
    os.makedirs(folder, exist_ok=True)
    write_hotspot_csv(os.path.join(folder, SCENE_FILES['hotspots']), hotspots)
    write_burned_areas(os.path.join(folder, SCENE_FILES['areas']), areas)
    if patches is not None:
        write_patch_store(os.path.join(folder, SCENE_FILES['patches']), patches)
    if truth is not None:
        truth.to_frame().to_csv(os.path.join(folder, SCENE_FILES['truth']), index=False)


def read_scene(folder):
    """
    Read a scene folder.

    Missing patch store or truth file give an empty list / None.

    Returns
    -------
    Scene namedtuple (hotspots, areas, patches, truth DataFrame or None)
    """
    path = lambda key: os.path.join(folder, SCENE_FILES[key])
    hotspots = read_hotspot_csv(path('hotspots'))
    areas = read_burned_areas(path('areas'))
    patches = read_patch_store(path('patches')) if os.path.isfile(path('patches')) else []
    truth = pd.read_csv(path('truth')) if os.path.isfile(path('truth')) else None
    return Scene(hotspots, areas, patches, truth)
