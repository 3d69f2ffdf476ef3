#!/usr/bin/env python

# synthetic.py - Synthetic hotspot campaigns with known ground truth
#
# Hotspot kinds planted by the generator:
#   fire        positive; inside an active burned area polygon
#   late        negative; inside a polygon but days after the fire went out
#   industrial  negative; persistent source revisited every ~12 h on weekdays
#   glint       negative; water surface, bright reflectance
#   clutter     negative; random location and time
#
# The benchmark preset has industrial sites that mimic fires (same sensor,
# land cover and Sentinel-3 signature) and glint peaking at the fire hour;
# persistence and time of day then carry what the channels cannot.

import datetime
from dataclasses import dataclass, field, asdict
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from hotspot_dis.core.geo import GeoPoint, PolygonGeom, TimeInterval, points_in_polygon
from hotspot_dis.core.records import HotspotRecord, BurnedAreaRecord, day_start, utc_date
from hotspot_dis.utils.constants import SENSOR_BANDS, SECONDS_PER_DAY, MONDAY_EPOCH, \
    PATCH_SIZE, N_SLSTR_CHANNELS, N_OLCI_CHANNELS, SLSTR_FIRE_CHANNELS, SLSTR_UPSAMPLE
from hotspot_dis.utils.hs_io.csv_io import parse_datetime
from hotspot_dis.utils.patches import assemble_patch
from hotspot_dis.utils.sampling import largest_remainder

KM_PER_DEG = 111.32
GRID_DEG = 0.25             # one fire or industrial site per grid cell
POLYGON_VERTICES = 12
MAX_ACTIVE_DAYS = 6
COARSE = 11                 # coarse SLSTR grid, upsampled x3 then cropped to 32

# Land cover class draws per hotspot kind
VEGETATION = ([2, 9, 4], [0.5, 0.3, 0.2])
CLUTTER_COVER = ([2, 4, 5, 6, 9], [0.2, 0.25, 0.2, 0.15, 0.2])

# OLCI channel groups inside the OLCI block
SMOKE_CHANNELS = slice(0, 5)
SCAR_CHANNELS = slice(5, 8)


class InfeasibleSceneError(ValueError):
    pass


@dataclass
class SceneConfig:
    """Parameters of a synthetic campaign.

    Fractions of negatives are taken in order industrial, glint, late;
    the remainder is clutter.
    """
    n_points: int = 1000
    n_fires: int = 10
    positive_fraction: float = 0.10
    n_industrial: int = 5
    industrial_fraction: float = 0.25
    glint_fraction: float = 0.10
    late_fraction: float = 0.05
    lat_range: Tuple[float, float] = (36.0, 44.0)
    lon_range: Tuple[float, float] = (-8.0, 20.0)
    start: str = '2019-06-03T00:00:00Z'
    duration_days: int = 90
    fire_radius_km: Tuple[float, float] = (1.5, 4.0)
    frp_signal: float = 1.0
    s3_signal: float = 4.0
    noise: float = 1.0
    missing_fraction: float = 0.02
    gap_fraction: float = 0.0
    with_patches: bool = True
    glint_hour: Optional[float] = None
    industrial_mimic: bool = False

    @classmethod
    def benchmark(cls, **overrides):
        """Scene where channels, persistence and model capacity all change the F1.

        Fire-like industrial sites are only told apart by their persistence,
        sun glint coincides with the afternoon fire peak and band values are
        the main sensor cue. Keyword arguments override single fields.
        """
        d = dict(n_points=1200, n_fires=12, positive_fraction=0.2,
                 industrial_fraction=0.10, glint_fraction=0.30, late_fraction=0.05,
                 fire_radius_km=(5.0, 8.0), frp_signal=0.0, noise=0.75,
                 glint_hour=13.5, industrial_mimic=True)
        d.update(overrides)
        return cls(**d)

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f'Unknown scene parameters {sorted(unknown)}.')
        d = dict(d)
        for key in ('lat_range', 'lon_range', 'fire_radius_km'):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class SyntheticTruth:
    """True label and kind of every planted hotspot, plus the generative settings."""
    ids: np.ndarray
    labels: np.ndarray
    kinds: np.ndarray
    seed: int
    config: dict = field(default_factory=dict)
    fires: list = field(default_factory=list)

    def to_frame(self):
        return pd.DataFrame({'id': self.ids, 'label': self.labels, 'kind': self.kinds})

    def label_of(self):
        return dict(zip(self.ids.tolist(), self.labels.tolist()))


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def _check_config(cfg):
    if cfg.n_points < 0:
        raise InfeasibleSceneError('n_points must be non-negative.')
    for name in ('positive_fraction', 'industrial_fraction', 'glint_fraction',
                 'late_fraction', 'missing_fraction', 'gap_fraction'):
        if not 0 <= getattr(cfg, name) <= 1:
            raise InfeasibleSceneError(f'{name} must be in [0, 1].')
    if cfg.industrial_fraction + cfg.glint_fraction + cfg.late_fraction > 1:
        raise InfeasibleSceneError('Negative kind fractions add up to more than 1.')
    n_pos = _round_half_up(cfg.n_points * cfg.positive_fraction)
    if n_pos > 0 and cfg.n_fires == 0:
        raise InfeasibleSceneError(f'{n_pos} positives requested but no fires to host them.')
    if cfg.duration_days < 2 * MAX_ACTIVE_DAYS + 2:
        raise InfeasibleSceneError(f'duration_days must be at least {2 * MAX_ACTIVE_DAYS + 2}.')
    n_rows = int((cfg.lat_range[1] - cfg.lat_range[0]) / GRID_DEG)
    n_cols = int((cfg.lon_range[1] - cfg.lon_range[0]) / GRID_DEG)
    if cfg.n_fires + cfg.n_industrial > n_rows * n_cols:
        raise InfeasibleSceneError('Region too small for the requested fires and sites.')
    if cfg.fire_radius_km[1] * 1.2 > GRID_DEG * KM_PER_DEG / 2 * np.cos(
            np.radians(max(abs(cfg.lat_range[0]), abs(cfg.lat_range[1])))):
        raise InfeasibleSceneError('Fire radius too large for the placement grid.')
    return n_pos


def _grid_cells(cfg, n, rng):
    """Centres of n distinct placement cells."""
    n_rows = int((cfg.lat_range[1] - cfg.lat_range[0]) / GRID_DEG)
    n_cols = int((cfg.lon_range[1] - cfg.lon_range[0]) / GRID_DEG)
    cells = rng.choice(n_rows * n_cols, size=n, replace=False)
    lat = cfg.lat_range[0] + (cells // n_cols + 0.5) * GRID_DEG
    lon = cfg.lon_range[0] + (cells % n_cols + 0.5) * GRID_DEG
    return lat, lon


def _fire_polygon(lat0, lon0, radius_km, rng):
    """Star-shaped polygon around a centre; also returns its inscribed radius (km)."""
    theta = 2 * np.pi * np.arange(POLYGON_VERTICES) / POLYGON_VERTICES
    r = radius_km * rng.uniform(0.8, 1.2, POLYGON_VERTICES)
    kx = KM_PER_DEG * np.cos(np.radians(lat0))
    x = r * np.cos(theta)
    y = r * np.sin(theta)
    ring = [(lon0 + xi / kx, lat0 + yi / KM_PER_DEG) for xi, yi in zip(x, y)]
    area_km2 = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    r_in = r.min() * np.cos(np.pi / POLYGON_VERTICES)
    return PolygonGeom.from_lonlat(ring), area_km2 * 100.0, r_in


def _in_disk(lat0, lon0, radius_km, n, rng):
    rho = radius_km * np.sqrt(rng.uniform(0, 1, n))
    phi = rng.uniform(0, 2 * np.pi, n)
    lat = lat0 + rho * np.sin(phi) / KM_PER_DEG
    lon = lon0 + rho * np.cos(phi) / (KM_PER_DEG * np.cos(np.radians(lat0)))
    return lat, lon


def _outside_fires(cfg, n, fires, rng):
    """n uniformly drawn locations clear of every fire polygon."""
    lat = np.empty(0)
    lon = np.empty(0)
    while lat.size < n:
        m = 2 * (n - lat.size) + 8
        la = np.round(rng.uniform(*cfg.lat_range, m), 5)
        lo = np.round(rng.uniform(*cfg.lon_range, m), 5)
        ok = np.ones(m, dtype=bool)
        for f in fires:
            lon_min, lat_min, lon_max, lat_max = f['polygon'].bbox
            near = (lo > lon_min - 0.01) & (lo < lon_max + 0.01) & \
                   (la > lat_min - 0.01) & (la < lat_max + 0.01)
            ok &= ~near
        lat = np.concatenate([lat, la[ok]])
        lon = np.concatenate([lon, lo[ok]])
    return lat[:n], lon[:n]


def _weekday(t):
    return int(((t - MONDAY_EPOCH) // SECONDS_PER_DAY) % 7)


def _plant_fires(cfg, n_pos, n_late, t0, rng):
    """Fire polygons with their positive and post-extinction hotspots."""
    fires = []
    lat_c, lon_c = _grid_cells(cfg, cfg.n_fires + cfg.n_industrial, rng)
    per_fire = largest_remainder(n_pos, np.ones(cfg.n_fires)) if cfg.n_fires else []
    late_per_fire = largest_remainder(n_late, np.ones(cfg.n_fires)) if cfg.n_fires else []
    points = []
    for f in range(cfg.n_fires):
        poly, area_ha, r_in = _fire_polygon(lat_c[f], lon_c[f],
                                            rng.uniform(*cfg.fire_radius_km), rng)
        d0 = int(rng.integers(0, cfg.duration_days - 2 * MAX_ACTIVE_DAYS))
        n_f = int(per_fire[f])
        k = max(1, min(MAX_ACTIVE_DAYS, n_f // 2))
        per_day = np.full(k, 2 if n_f >= 2 else n_f)
        extra = n_f - per_day.sum()
        if extra > 0:
            per_day += np.bincount(rng.integers(0, k, extra), minlength=k)
        first_day = utc_date(t0) + datetime.timedelta(days=d0)
        extinct = first_day + datetime.timedelta(days=k if n_f >= 2 else 0)
        reported_end = first_day + datetime.timedelta(days=k - 1 + int(rng.integers(2, 8)))
        fires.append({'id': f'BA{f:04d}', 'polygon': poly, 'area_ha': float(area_ha),
                      'start': first_day, 'end': reported_end, 'extinct': extinct})

        days = np.repeat(np.arange(k), per_day)
        late_days = k + 2 + rng.integers(0, 10, int(late_per_fire[f]))
        for kind, offsets in (('fire', days), ('late', late_days)):
            lat, lon = _in_disk(lat_c[f], lon_c[f], 0.9 * r_in, offsets.size, rng)
            if kind == 'fire':
                # Fires are mostly detected in the afternoon
                sod = np.mod(rng.normal(13.5 * 3600, 3 * 3600, offsets.size), SECONDS_PER_DAY)
            else:
                sod = rng.uniform(0, SECONDS_PER_DAY, offsets.size)
            for la, lo, d, s in zip(lat, lon, offsets, sod):
                t = day_start(first_day + datetime.timedelta(days=int(d))) + int(s)
                points.append((kind, round(la, 5), round(lo, 5), float(t)))
    sites = list(zip(lat_c[cfg.n_fires:], lon_c[cfg.n_fires:]))
    return fires, sites, points


def _plant_industrial(cfg, n, sites, t0, rng):
    points = []
    if n == 0 or not sites:
        return points
    per_site = largest_remainder(n, np.ones(len(sites)))
    for (lat0, lon0), m in zip(sites, per_site):
        t = t0 + rng.uniform(0, SECONDS_PER_DAY * cfg.duration_days / 2)
        for _ in range(int(m)):
            t += 12 * 3600 + rng.normal(0, 1800)
            while _weekday(t) >= 5:
                t += SECONDS_PER_DAY
            la = lat0 + rng.normal(0, 0.001)
            lo = lon0 + rng.normal(0, 0.001)
            points.append(('industrial', round(la, 5), round(lo, 5), float(np.floor(t))))
    return points


# Mean log FRP and (mid-IR, thermal-IR) brightness temperatures per kind
KIND_SIGNATURE = {'fire': (np.log(8.0), 330.0, 300.0),
                  'late': (np.log(8.0), 318.0, 298.0),
                  'industrial': (np.log(60.0), 345.0, 300.0),
                  'glint': (np.log(5.0), 320.0, 295.0),
                  'clutter': (np.log(8.0), 318.0, 298.0)}


def _signature_kind(kind, cfg):
    """Kind whose sensor, land cover and patch signature a hotspot carries."""
    if kind == 'industrial' and cfg.industrial_mimic:
        return 'fire'
    return kind


def _sensor_values(kind, cfg, rng):
    sensor = rng.choice(list(SENSOR_BANDS), p=[0.4, 0.3, 0.3])
    logfrp, mid, thermal = KIND_SIGNATURE[kind]
    if kind == 'fire':
        logfrp += 0.9 * cfg.frp_signal
        mid += 15.0 * cfg.frp_signal
    frp = round(float(np.exp(logfrp + 0.7 * cfg.noise * rng.normal())), 1)
    band_mid, band_thermal = SENSOR_BANDS[sensor]
    bands = {band_mid: round(mid + 8.0 * cfg.noise * rng.normal(), 2),
             band_thermal: round(thermal + 4.0 * cfg.noise * rng.normal(), 2)}
    if rng.uniform() < cfg.missing_fraction:
        frp = None
    if rng.uniform() < cfg.missing_fraction:
        del bands[band_mid]
    confidence = float(rng.integers(30, 101))
    return str(sensor), frp, bands, confidence


def _land_cover(kind, rng):
    if kind == 'glint':
        return 1
    if kind == 'industrial':
        if rng.uniform() < 0.5:
            return 5
        return int(rng.choice(VEGETATION[0], p=VEGETATION[1]))
    if kind in ('fire', 'late'):
        return int(rng.choice(VEGETATION[0], p=VEGETATION[1]))
    return int(rng.choice(CLUTTER_COVER[0], p=CLUTTER_COVER[1]))


def _synthetic_patch(hid, kind, lulc, cfg, rng, slstr_means, olci_means):
    """Patch of one hotspot with the kind's Sentinel-3 signature planted."""
    n = cfg.noise
    slstr = slstr_means + 0.5 * n * rng.normal(size=(COARSE, COARSE, N_SLSTR_CHANNELS))
    olci = olci_means + 0.5 * n * rng.normal(size=(PATCH_SIZE, PATCH_SIZE, N_OLCI_CHANNELS))

    ci = np.arange(COARSE) - COARSE // 2
    blob = np.exp(-(ci[:, None]**2 + ci[None, :]**2) / (2 * 0.8**2))
    pi = np.arange(PATCH_SIZE) - PATCH_SIZE // 2
    plume = np.exp(-(pi[:, None]**2 + pi[None, :]**2) / (2 * 6.0**2))

    amp = cfg.s3_signal
    fire_channels = list(SLSTR_FIRE_CHANNELS)
    if kind == 'fire':
        slstr[:, :, fire_channels] += amp * (1 + 0.2 * rng.normal()) * blob[:, :, None]
        olci[:, :, SMOKE_CHANNELS] += 0.6 * amp * plume[:, :, None]
    elif kind == 'industrial':
        slstr[:, :, fire_channels] += amp * (1 + 0.2 * rng.normal()) * blob[:, :, None]
        if rng.uniform() < 0.6:
            olci[:, :, SMOKE_CHANNELS] += 0.6 * amp * plume[:, :, None]
    elif kind == 'glint':
        slstr[:, :, fire_channels] += 0.3 * amp * blob[:, :, None]
        olci += 1.5
    elif kind == 'late':
        olci[:, :, SCAR_CHANNELS] -= 0.5 * amp

    cover = np.full((PATCH_SIZE, PATCH_SIZE), float(lulc))
    other = int(rng.integers(1, 10))
    r0, c0 = rng.integers(0, 8, 2)
    cover[r0:r0 + 8, c0:c0 + 8] = other     # never reaches the centre pixel

    if cfg.gap_fraction > 0:
        gaps = rng.uniform(size=(PATCH_SIZE, PATCH_SIZE)) < cfg.gap_fraction
        olci[gaps] = np.nan
    scene_means = np.concatenate([slstr_means, olci_means])
    return assemble_patch(hid, slstr, olci, cover, factor=SLSTR_UPSAMPLE,
                          scene_means=scene_means)


def generate_synthetic_scene(cfg=None, seed=0):
    """
    Generate a synthetic hotspot campaign.

    Parameters
    ----------
    cfg : SceneConfig, optional
    seed : int

    Returns
    -------
    hotspots : list of HotspotRecord (unlabeled)
    areas : list of BurnedAreaRecord
    patches : list of RasterPatch (empty if cfg.with_patches is False)
    truth : SyntheticTruth
    """
    cfg = SceneConfig() if cfg is None else cfg
    n_pos = _check_config(cfg)
    rng = np.random.default_rng(seed)
    t0 = parse_datetime(cfg.start)

    n_neg = cfg.n_points - n_pos
    n_ind = _round_half_up(n_neg * cfg.industrial_fraction) if cfg.n_industrial else 0
    n_glint = _round_half_up(n_neg * cfg.glint_fraction)
    n_late = _round_half_up(n_neg * cfg.late_fraction) if cfg.n_fires else 0
    n_clutter = n_neg - n_ind - n_glint - n_late

    fires, sites, points = _plant_fires(cfg, n_pos, n_late, t0, rng)
    points += _plant_industrial(cfg, n_ind, sites, t0, rng)
    lat, lon = _outside_fires(cfg, n_glint + n_clutter, fires, rng)
    times = np.floor(t0 + rng.uniform(0, cfg.duration_days * SECONDS_PER_DAY, lat.size))
    if cfg.glint_hour is not None and n_glint:
        # Glint follows the sun: same day, around the configured UTC hour
        sod = np.mod(rng.normal(cfg.glint_hour * 3600, 1800, n_glint), SECONDS_PER_DAY)
        days = np.floor(times[:n_glint] / SECONDS_PER_DAY)
        times[:n_glint] = days * SECONDS_PER_DAY + np.floor(sod)
    for i in range(lat.size):
        kind = 'glint' if i < n_glint else 'clutter'
        points.append((kind, float(lat[i]), float(lon[i]), float(times[i])))

    order = rng.permutation(len(points))
    slstr_means = np.linspace(-1.0, 1.0, N_SLSTR_CHANNELS)
    olci_means = np.linspace(-1.0, 1.0, N_OLCI_CHANNELS)
    hotspots, patches, kinds = [], [], []
    for k, j in enumerate(order):
        kind, la, lo, t = points[j]
        hid = k + 1
        look = _signature_kind(kind, cfg)
        sensor, frp, bands, confidence = _sensor_values(look, cfg, rng)
        hotspots.append(HotspotRecord(id=hid, point=GeoPoint(la, lo), time=t, sensor=sensor,
                                      frp=frp, bands=bands, confidence=confidence))
        kinds.append(kind)
        lulc = _land_cover(look, rng)
        if cfg.with_patches:
            patches.append(_synthetic_patch(hid, look, lulc, cfg, rng, slstr_means, olci_means))

    areas = [BurnedAreaRecord(id=f['id'], geometry=(f['polygon'],),
                              reported=TimeInterval(day_start(f['start']),
                                                    day_start(f['end']) + SECONDS_PER_DAY - 1),
                              area_ha=f['area_ha'])
             for f in fires]

    kinds = np.array(kinds, dtype=object)
    truth = SyntheticTruth(ids=np.arange(1, len(hotspots) + 1, dtype=np.uint64),
                           labels=(kinds == 'fire').astype(int),
                           kinds=kinds.astype(str),
                           seed=seed,
                           config=asdict(cfg),
                           fires=[{'id': f['id'], 'start': f['start'].isoformat(),
                                   'extinct': f['extinct'].isoformat()} for f in fires])
    return hotspots, areas, patches, truth


def truth_consistent(hotspots, areas, truth):
    """Check every planted fire hotspot lies in its polygon during the true activity."""
    lookup = {f['id']: f for f in truth.fires}
    labels = truth.label_of()
    for h in hotspots:
        if labels[h.id] != 1:
            continue
        ok = False
        for a in areas:
            end = day_start(datetime.date.fromisoformat(lookup[a.id]['extinct'])) \
                + SECONDS_PER_DAY - 1
            if a.reported.start <= h.time <= end and \
                    points_in_polygon([h.point.lon], [h.point.lat], a.geometry[0])[0]:
                ok = True
                break
        if not ok:
            return False
    return True
