#!/usr/bin/env python

# geo.py - Geometry primitives and the spatio-temporal hotspot index

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree

from hotspot_dis.utils.constants import EARTH_RADIUS

# Tolerance (deg^2) on the edge cross product for a point to count as on a ring
BOUNDARY_EPS = 1e-12
# Margin added to the degree box used to pre-filter radius queries
BOX_MARGIN = 1e-9


class AntimeridianError(ValueError):
    pass


class DuplicateIdError(ValueError):
    pass


def normalize_lon(lon):
    """Wrap longitudes into [-180, 180). Values already in range are untouched."""
    lon = np.asarray(lon, dtype=float)
    inrange = (lon >= -180.0) & (lon < 180.0)
    return np.where(inrange, lon, np.mod(lon + 180.0, 360.0) - 180.0)


@dataclass(frozen=True)
class GeoPoint:
    """Geographic position in degrees."""
    lat: float
    lon: float

    def __post_init__(self):
        lat = float(self.lat)
        lon = float(self.lon)
        if not (np.isfinite(lat) and np.isfinite(lon)):
            raise ValueError(f'Non-finite coordinate ({lat}, {lon}).')
        if lat < -90.0 or lat > 90.0:
            raise ValueError(f'Latitude {lat} outside [-90, 90].')
        object.__setattr__(self, 'lat', lat)
        object.__setattr__(self, 'lon', float(normalize_lon(lon)))


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval [start, end] of UTC seconds."""
    start: float
    end: float

    def __post_init__(self):
        if not self.start <= self.end:
            raise ValueError(f'Interval start {self.start} is after end {self.end}.')

    def contains(self, t):
        t = np.asarray(t)
        return (t >= self.start) & (t <= self.end)


def _ring_to_array(ring):
    """(N, 2) lon/lat array from GeoPoints or (lon, lat) pairs, closing vertex dropped."""
    pts = [(p.lon, p.lat) if isinstance(p, GeoPoint) else (float(p[0]), float(p[1]))
           for p in ring]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(set(pts)) < 3:
        raise ValueError('A polygon ring needs at least 3 distinct vertices.')
    arr = np.array(pts, dtype=float)
    dlon = np.abs(np.diff(np.append(arr[:, 0], arr[0, 0])))
    if np.any(dlon > 180.0):
        raise AntimeridianError('Polygons crossing the antimeridian are not supported.')
    return arr


@dataclass(frozen=True)
class PolygonGeom:
    """Planar lon/lat polygon with optional holes.

    Rings are closed implicitly; a repeated closing vertex is dropped.
    Self-intersection is not checked.
    """
    exterior: Tuple[GeoPoint, ...]
    holes: Tuple[Tuple[GeoPoint, ...], ...] = ()
    _rings: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ext = _ring_to_array(self.exterior)
        holes = tuple(_ring_to_array(h) for h in self.holes)
        object.__setattr__(self, 'exterior',
                           tuple(GeoPoint(lat, lon) for lon, lat in ext))
        object.__setattr__(self, 'holes',
                           tuple(tuple(GeoPoint(lat, lon) for lon, lat in h) for h in holes))
        object.__setattr__(self, '_rings', (ext,) + holes)

    @classmethod
    def from_lonlat(cls, exterior, holes=()):
        """Build from GeoJSON-style [lon, lat] position lists."""
        to_pts = lambda ring: tuple(GeoPoint(p[1], p[0]) for p in ring)
        return cls(to_pts(exterior), tuple(to_pts(h) for h in holes))

    @property
    def rings(self):
        return self._rings

    @property
    def bbox(self):
        """(lon_min, lat_min, lon_max, lat_max) of the exterior ring."""
        ext = self._rings[0]
        return (ext[:, 0].min(), ext[:, 1].min(), ext[:, 0].max(), ext[:, 1].max())

    def to_lonlat(self):
        ring = lambda r: [[float(x), float(y)] for x, y in r]
        return [ring(r) for r in self._rings]


def _ring_tests(x, y, ring):
    """Even-odd parity and on-boundary masks of points against one ring."""
    parity = np.zeros(x.shape, dtype=bool)
    boundary = np.zeros(x.shape, dtype=bool)
    n = ring.shape[0]
    for i in range(n):
        xi, yi = ring[i]
        xj, yj = ring[i - 1]
        straddles = (yi > y) != (yj > y)
        with np.errstate(divide='ignore', invalid='ignore'):
            xcross = (xj - xi) * (y - yi) / (yj - yi) + xi
        parity ^= straddles & (x < xcross)

        cross = (xj - xi) * (y - yi) - (yj - yi) * (x - xi)
        boundary |= ((np.abs(cross) <= BOUNDARY_EPS)
                     & (x >= min(xi, xj)) & (x <= max(xi, xj))
                     & (y >= min(yi, yj)) & (y <= max(yi, yj)))
    return parity, boundary


def points_in_polygon(lon, lat, poly):
    """Vectorised point in polygon test (even-odd, boundary inclusive).

    Parameters
    ----------
    lon, lat : array-like
        Point coordinates in degrees.
    poly : PolygonGeom

    Returns
    -------
    numpy.ndarray of bool
    """
    x = np.asarray(lon, dtype=float)
    y = np.asarray(lat, dtype=float)
    inside = np.zeros(x.shape, dtype=bool)
    on_edge = np.zeros(x.shape, dtype=bool)
    for ring in poly.rings:
        parity, boundary = _ring_tests(x, y, ring)
        inside ^= parity
        on_edge |= boundary
    return inside | on_edge


def point_in_polygon(p, poly):
    return bool(points_in_polygon(np.array([p.lon]), np.array([p.lat]), poly)[0])


def haversine(lat1, lon1, lat2, lon2):
    """Great circle distance in metres, vectorised over numpy arrays."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    dphi = np.abs(phi2 - phi1)
    dlmb = np.abs(np.radians(lon2) - np.radians(lon1))
    a = np.sin(dphi / 2)**2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlmb / 2)**2
    return 2 * EARTH_RADIUS * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def haversine_distance(a, b):
    """Distance in metres between two GeoPoints."""
    return float(haversine(a.lat, a.lon, b.lat, b.lon))


class STIndex(object):
    """
      STIndex Class - read-only spatio-temporal index over point records

      A KD-tree over (lon, lat) degrees gives a conservative box pre-filter;
      exact haversine / point in polygon and time tests are applied to the
      candidates. Arrays are frozen after construction.
    """
    def __init__(self, ids, lat, lon, times):
        self.ids = np.asarray(ids, dtype=np.uint64).reshape(-1)
        self.lat = np.asarray(lat, dtype=float).reshape(-1)
        self.lon = normalize_lon(np.asarray(lon, dtype=float).reshape(-1))
        self.times = np.asarray(times, dtype=float).reshape(-1)
        n = self.ids.size
        if not (self.lat.size == self.lon.size == self.times.size == n):
            raise ValueError('ids, lat, lon and times must have the same length.')

        uniq, counts = np.unique(self.ids, return_counts=True)
        if np.any(counts > 1):
            dups = uniq[counts > 1][:5].tolist()
            raise DuplicateIdError(f'Duplicate record id(s) in index input: {dups}.')

        for arr in (self.ids, self.lat, self.lon, self.times):
            arr.flags.writeable = False

        if n > 0:
            self._tree = cKDTree(np.column_stack([self.lon, self.lat]))
        else:
            self._tree = None

    def __len__(self):
        return self.ids.size

    def _box_candidates(self, lon_c, lat_c, half):
        """Positions within a lon/lat box (Chebyshev ball) around a centre."""
        if self._tree is None:
            return np.empty(0, dtype=np.intp)
        if half >= 180.0:
            return np.arange(len(self), dtype=np.intp)
        centres = [lon_c]
        if lon_c - half < -180.0:
            centres.append(lon_c + 360.0)
        if lon_c + half >= 180.0:
            centres.append(lon_c - 360.0)
        found = []
        for c in centres:
            found.extend(self._tree.query_ball_point([c, lat_c], half, p=np.inf))
        return np.unique(np.asarray(found, dtype=np.intp))

    def radius_positions(self, center, radius, interval):
        """Sorted array positions within `radius` metres and inside `interval`."""
        if radius < 0:
            raise ValueError(f'Radius must be non-negative, got {radius}.')
        ang = radius / EARTH_RADIUS
        if ang >= np.pi:
            half = 180.0
        else:
            dlat = np.degrees(ang)
            if abs(center.lat) + dlat >= 90.0:
                dlon = 180.0
            else:
                ratio = np.sin(ang) / np.cos(np.radians(center.lat))
                dlon = np.degrees(np.arcsin(min(1.0, ratio)))
            half = max(dlat, dlon) * (1 + BOX_MARGIN) + BOX_MARGIN

        cand = self._box_candidates(center.lon, center.lat, half)
        if cand.size == 0:
            return cand
        cand = cand[interval.contains(self.times[cand])]
        dist = haversine(center.lat, center.lon, self.lat[cand], self.lon[cand])
        return cand[dist <= radius]

    def polygon_positions(self, poly, interval):
        """Sorted array positions inside `poly` and inside `interval`."""
        lon_min, lat_min, lon_max, lat_max = poly.bbox
        half = max(lon_max - lon_min, lat_max - lat_min) / 2 + BOX_MARGIN
        cand = self._box_candidates((lon_min + lon_max) / 2, (lat_min + lat_max) / 2, half)
        if cand.size == 0:
            return cand
        cand = cand[interval.contains(self.times[cand])]
        lon = self.lon[cand]
        lat = self.lat[cand]
        inbox = (lon >= lon_min) & (lon <= lon_max) & (lat >= lat_min) & (lat <= lat_max)
        cand, lon, lat = cand[inbox], lon[inbox], lat[inbox]
        return cand[points_in_polygon(lon, lat, poly)]

    def query_radius_time(self, center, radius, interval):
        return set(self.ids[self.radius_positions(center, radius, interval)].tolist())

    def query_polygon_time(self, poly, interval):
        return set(self.ids[self.polygon_positions(poly, interval)].tolist())


def build_st_index(records):
    """Build an STIndex from (id, GeoPoint, time) tuples or hotspot records.

    Parameters
    ----------
    records : iterable
        Either 3-tuples ``(id, GeoPoint, time)`` or objects with ``id``,
        ``point`` and ``time`` attributes.

    Returns
    -------
    STIndex
    """
    ids, lat, lon, times = [], [], [], []
    for rec in records:
        if isinstance(rec, tuple):
            rid, point, t = rec
        else:
            rid, point, t = rec.id, rec.point, rec.time
        ids.append(rid)
        lat.append(point.lat)
        lon.append(point.lon)
        times.append(t)
    return STIndex(ids, lat, lon, times)


def query_radius_time(idx, center, radius, interval):
    return idx.query_radius_time(center, radius, interval)


def query_polygon_time(idx, poly, interval):
    return idx.query_polygon_time(poly, interval)
