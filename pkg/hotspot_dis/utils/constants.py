#!/usr/bin/env python

# constants.py - Definition of all the constants

EARTH_RADIUS = 6371008.8    # m, mean Earth radius (IUGG)

SECONDS_PER_DAY = 86400
SECONDS_PER_WEEK = 604800
# 1970-01-05T00:00:00Z, the first Monday after the epoch
MONDAY_EPOCH = 345600

# Sensors and the brightness-temperature bands each may report
SENSOR_BANDS = {'MODIS': ('t_21', 't_31'),
                'VIIRS750': ('t_m13', 't_m15'),
                'VIIRS375': ('t_i4', 't_i5')}
BANDS = ('t_21', 't_31', 't_m13', 't_m15', 't_i4', 't_i5')
SENSOR_VALUES = ('frp',) + BANDS

HOTSPOT_CSV_COLUMNS = ('id', 'latitude', 'longitude', 'acq_datetime', 'sensor',
                       'confidence', 'frp') + BANDS
HOTSPOT_CSV_MANDATORY = ('id', 'latitude', 'longitude', 'acq_datetime', 'sensor')
DATETIME_FORMAT = '%Y-%m-%dT%H:%M:%SZ'

# Land use / land cover classes (10 m annual LULC product)
LULC_CLASSES = {1: 'water',
                2: 'trees',
                3: 'flooded_vegetation',
                4: 'crops',
                5: 'built_area',
                6: 'bare_ground',
                7: 'snow_ice',
                8: 'clouds',
                9: 'rangeland'}
N_LULC = len(LULC_CLASSES)

# Sentinel-3 patches
PATCH_SIZE = 32             # pixels
PATCH_CHANNELS = 33         # 32 Sentinel-3 + 1 land cover
N_S3_CHANNELS = 32
N_SLSTR_CHANNELS = 11       # 9 bands + 2 fire bands, 1 km
N_OLCI_CHANNELS = 21        # 300 m
SLSTR_FIRE_CHANNELS = (9, 10)
LULC_CHANNEL = 32
PATCH_CENTER = (16, 16)
SLSTR_UPSAMPLE = 3
# Sentinel-3 data are available from this date onwards
S3_AVAILABLE_FROM = '2016-02-16T00:00:00Z'

# Patch store binary format
PATCH_STORE_MAGIC = b'HSPT'
PATCH_STORE_VERSION = 1

# Burned areas
MIN_BURNED_AREA_HA = 30.0
EXTINCTION_MIN_COUNT = 2
EXTINCTION_SEARCH_DAYS = 30

# Number of previous hotspots
NPH_RADIUS = 1000.0         # m
NPH_WINDOWS = (12, 24, 36)  # hours

# Feature set presets
FEATURE_BLOCKS = ('modis_viirs', 'time', 'land_cover', 'sentinel3', 'nph')
FEATURE_SETS = {'FS1': ('modis_viirs', 'time'),
                'FS2': ('modis_viirs', 'time', 'land_cover'),
                'FS3': ('modis_viirs', 'time', 'land_cover', 'sentinel3'),
                'FS4': ('modis_viirs', 'time', 'land_cover', 'sentinel3', 'nph'),
                'FS5': ('time', 'land_cover', 'sentinel3', 'nph'),
                'FS6': ('land_cover', 'sentinel3')}

# Sampling
TARGET_POS_FRAC = 0.10
CELL_DEG = 1.0
N_SPLITS = 50
ROLE_SPLITS = {'train': 28, 'val': 14, 'test': 8}

# Models
MODEL_FILE_VERSION = 1
DECISION_THRESHOLD = 0.5
MLP_HIDDEN = (128, 64)
EMBEDDING_DIM = 16
FUSION_HIDDEN = 32
TABULAR_DIM = 21            # sensor 14 + time 4 + nph 3
