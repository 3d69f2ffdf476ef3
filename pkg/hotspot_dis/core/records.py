#!/usr/bin/env python

# records.py - Hotspot, burned area and raster patch record types

import datetime
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from hotspot_dis.core.geo import GeoPoint, PolygonGeom, TimeInterval, points_in_polygon
from hotspot_dis.utils.constants import SENSOR_BANDS, BANDS, MIN_BURNED_AREA_HA, \
    PATCH_SIZE, PATCH_CHANNELS, LULC_CHANNEL, N_LULC, SECONDS_PER_DAY


class BandError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class Sensor(str, Enum):
    MODIS = 'MODIS'
    VIIRS750 = 'VIIRS750'
    VIIRS375 = 'VIIRS375'


@dataclass
class HotspotRecord:
    """One thermal anomaly detection.

    ``bands`` maps band names to brightness temperatures (K); only the bands
    of the record's sensor are allowed. ``label`` is 1 (wildfire),
    0 (other heat source) or None.
    """
    id: int
    point: GeoPoint
    time: float
    sensor: Sensor
    frp: Optional[float] = None
    bands: Dict[str, float] = field(default_factory=dict)
    confidence: Optional[float] = None
    label: Optional[int] = None

    def __post_init__(self):
        self.id = int(self.id)
        if self.id < 0 or self.id >= 2**64:
            raise ValueError(f'Hotspot id {self.id} is not an unsigned 64-bit integer.')
        self.sensor = Sensor(self.sensor)
        allowed = SENSOR_BANDS[self.sensor.value]
        bad = [k for k in self.bands if k not in allowed]
        if bad:
            raise BandError(f'{self.sensor.value} records may only carry bands '
                            f'{allowed}, got {bad}.')
        if self.frp is not None and self.frp < 0:
            raise ValueError(f'FRP must be non-negative, got {self.frp}.')
        if self.confidence is not None and not 0 <= self.confidence <= 100:
            raise ValueError(f'Confidence {self.confidence} outside [0, 100].')
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f'Label must be 0 or 1, got {self.label}.')

    def sensor_values(self):
        """frp followed by every band (NaN when not observed)."""
        vals = [np.nan if self.frp is None else self.frp]
        vals += [self.bands.get(b, np.nan) for b in BANDS]
        return np.array(vals, dtype=float)


def day_start(d):
    """UTC seconds at 00:00:00 of a date."""
    return float(datetime.datetime(d.year, d.month, d.day,
                                   tzinfo=datetime.timezone.utc).timestamp())


def utc_date(t):
    return datetime.datetime.fromtimestamp(float(t), tz=datetime.timezone.utc).date()


def end_of_day(d):
    """Last representable UTC second-float of a date."""
    return float(np.nextafter(day_start(d) + SECONDS_PER_DAY, -np.inf))


@dataclass(frozen=True)
class BurnedAreaRecord:
    """A burned area event: one or more polygons and its reported activity."""
    id: str
    geometry: Tuple[PolygonGeom, ...]
    reported: TimeInterval
    area_ha: float
    estimated_end: Optional[datetime.date] = None

    def __post_init__(self):
        geom = self.geometry
        if isinstance(geom, PolygonGeom):
            geom = (geom,)
        geom = tuple(geom)
        if not geom:
            raise ValueError(f'Burned area {self.id} has no polygons.')
        object.__setattr__(self, 'geometry', geom)
        if self.area_ha < MIN_BURNED_AREA_HA:
            raise ValueError(f'Burned area {self.id} is {self.area_ha} ha, '
                             f'below the {MIN_BURNED_AREA_HA} ha floor.')

    @property
    def start_date(self):
        return utc_date(self.reported.start)

    @property
    def end_date(self):
        return utc_date(self.reported.end)

    def with_estimated_end(self, d):
        return replace(self, estimated_end=d)

    def active_window(self):
        """Reported start to the end of the estimated extinction day."""
        if self.estimated_end is None:
            raise ValueError(f'Extinction date of burned area {self.id} not estimated.')
        return TimeInterval(self.reported.start, max(self.reported.start,
                                                     end_of_day(self.estimated_end)))

    def contains(self, lon, lat):
        """Vectorised membership over all polygon parts."""
        lon = np.asarray(lon, dtype=float)
        inside = np.zeros(lon.shape, dtype=bool)
        for poly in self.geometry:
            inside |= points_in_polygon(lon, lat, poly)
        return inside


@dataclass
class RasterPatch:
    """32x32x33 float32 grid centred on a hotspot.

    Channels 0-31 are Sentinel-3 values, channel 32 the land cover class code.
    ``gap_filled`` flags patches whose missing pixels were replaced at ingestion.
    """
    hotspot_id: int
    values: np.ndarray
    gap_filled: bool = False

    def __post_init__(self):
        self.hotspot_id = int(self.hotspot_id)
        self.values = np.asarray(self.values, dtype=np.float32)

    def validate(self):
        shape = (PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS)
        if self.values.shape != shape:
            raise ShapeError(f'Patch {self.hotspot_id} has shape {self.values.shape}, '
                             f'expected {shape}.')
        if np.isnan(self.values).any():
            raise ValueError(f'Patch {self.hotspot_id} contains NaN values.')
        lc = self.values[:, :, LULC_CHANNEL]
        if np.any(lc != np.round(lc)) or lc.min() < 1 or lc.max() > N_LULC:
            raise ValueError(f'Patch {self.hotspot_id} land cover channel must hold '
                             f'integer class codes in [1, {N_LULC}].')
        return self

