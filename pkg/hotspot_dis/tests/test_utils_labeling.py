import datetime
import functools
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hotspot_dis.core.geo import GeoPoint, PolygonGeom, TimeInterval, build_st_index
from hotspot_dis.core.records import HotspotRecord, BurnedAreaRecord, day_start
from hotspot_dis.utils.labeling import first_quiet_day, daily_counts, \
    estimate_extinction_date, label_hotspots, label_campaign, apply_labels
from hotspot_dis.utils.synthetic import generate_synthetic_scene, SceneConfig

D0 = datetime.date(2019, 7, 1)
SQUARE = PolygonGeom.from_lonlat([[0, 0], [0.1, 0], [0.1, 0.1], [0, 0.1]])


def _area(end_offset=3):
    end = D0 + datetime.timedelta(days=end_offset)
    return BurnedAreaRecord('A', (SQUARE,), TimeInterval(day_start(D0),
                                                         day_start(end) + 86399), 100.0)


def _hotspots(per_day, inside=True):
    """Hotspots at noon of consecutive days starting D0, `per_day[k]` on day k."""
    out = []
    hid = 1
    for k, n in enumerate(per_day):
        t = day_start(D0 + datetime.timedelta(days=k)) + 12 * 3600
        for j in range(n):
            lon = 0.05 if inside else 0.5
            out.append(HotspotRecord(hid, GeoPoint(0.05, lon), t + j, 'MODIS'))
            hid += 1
    return out


def test_first_quiet_day():
    assert first_quiet_day([5, 3, 2, 1, 4]) == 3
    assert first_quiet_day([0, 3]) == 0
    assert first_quiet_day([2, 2, 2]) is None
    assert first_quiet_day([3, 3, 1], min_count=4) == 0


@pytest.mark.parametrize('per_day, expected_offset', [
    ([5, 4, 3, 1, 0], 3),
    ([5, 0, 6, 6], 1),
    ([1, 5, 5], 0),
    ([2, 2, 2, 2, 2, 2, 3, 0], 7),
    ([0], 0),
    ([1], 0),
    ([2], 1),
    ([2, 2], 2),
    ([2, 1], 1),
    ([3, 0, 3], 1),
    ([5, 5, 5, 1], 3),
    ([4, 3, 2, 1], 3),
    ([1, 1, 1], 0),
    ([2, 2, 2, 2, 0, 5], 4),
    ([9, 8, 7, 6, 5, 4, 3, 2, 1], 8),
    ([2, 3, 2, 3, 2, 3], 6),
    ([6, 0], 1),
    ([0, 6, 6], 0),
    ([2, 2, 1, 2, 2], 2),
    ([3] * 10, 10),
    ([10, 1, 10], 1),
    ([2, 5, 2, 5, 1], 4),
    ([7], 1),
    ([7, 7], 2),
    ([4, 4, 4, 0, 0, 0], 3),
    ([3, 2, 2, 2, 2, 2, 2, 1], 7),
    ([1, 0, 5], 0),
    ([2, 0, 2, 0], 1),
    ([5, 4, 3, 3, 4, 5, 1], 6),
    ([2] * 5, 5),
    ([2] * 12 + [1], 12),
    ([3] * 20, 20),
    ([2] * 33, 33),
    ([4, 4, 1, 4, 4], 2),
    ([2, 2, 2, 1, 1], 3),
    ([8, 2, 8, 2, 8, 0], 5),
    ([3, 1], 1),
    ([0, 0, 0], 0),
    ([2, 4, 6, 8, 10, 0], 5),
    ([12, 11, 10, 9, 1, 9], 4),
    ([2, 2, 3, 1, 3], 3),
    ([6, 5, 4, 3, 2, 0], 5),
    ([2, 1, 0], 1),
    ([5, 3] + [2] * 8 + [1], 10),
    ([3, 3, 0, 3, 3], 2),
    ([4, 0, 0, 4], 1),
    ([2] * 14 + [0], 14),
    ([1, 2, 2], 0),
    ([2, 3, 4, 5, 6, 7, 8, 9, 10], 9),
    ([3, 2, 1, 0], 2),
    ([5] * 7, 7),
    ([2, 6, 2, 6, 2, 6, 2, 6, 1, 6], 8),
    # Busy through the whole search window: the reported end (day 3) is kept
    ([2] * 34, 3),
    ([5] * 40, 3),
])
def test_extinction_sequences(per_day, expected_offset):
    hs = _hotspots(per_day)
    idx = build_st_index(hs)
    area = _area()
    assert np.array_equal(daily_counts(area, idx, len(per_day)), per_day)
    assert estimate_extinction_date(area, idx) == D0 + datetime.timedelta(days=expected_offset)


def test_extinction_falls_back_to_reported_end():
    # Two hotspots every day of the search window
    hs = _hotspots([2] * 40)
    idx = build_st_index(hs)
    area = _area(end_offset=3)
    assert estimate_extinction_date(area, idx, search_days=30) == D0 + datetime.timedelta(days=3)


def test_extinction_ignores_outside_hotspots():
    hs = _hotspots([5, 5, 5], inside=False)
    idx = build_st_index(hs)
    assert estimate_extinction_date(_area(), idx) == D0


def test_label_hotspots_window():
    hs = _hotspots([3, 3, 1, 4])
    idx = build_st_index(hs)
    area = _area().with_estimated_end(D0 + datetime.timedelta(days=2))
    report = label_hotspots(hs, [area], idx)
    # Days 0-2 inclusive are active, day 3 is after the estimated end
    assert [report.labels[h.id] for h in hs] == [1] * 7 + [0] * 4
    assert report.matched == {'A': 7}
    assert report.positives == 7 and report.negatives == 4

    with pytest.raises(ValueError):
        label_hotspots(hs, [_area()], idx)


def _brute_force_labels(hotspots, dated):
    """O(N*M) join: every hotspot against every dated area."""
    lon = np.array([h.point.lon for h in hotspots])
    lat = np.array([h.point.lat for h in hotspots])
    t = np.array([h.time for h in hotspots])
    positive = np.zeros(len(hotspots), dtype=bool)
    for a in dated:
        positive |= a.contains(lon, lat) & a.active_window().contains(t)
    return {h.id: int(v) for h, v in zip(hotspots, positive.tolist())}


@pytest.mark.parametrize('seed', range(20))
def test_label_campaign_brute_force(seed):
    cfg = SceneConfig(n_points=250 * (seed + 1), n_fires=3 + (7 * seed) % 48,
                      with_patches=False)
    hotspots, areas, _, _ = generate_synthetic_scene(cfg, seed=seed)
    dated, report = label_campaign(hotspots, areas)
    assert len(dated) <= 50 and len(hotspots) <= 5000
    assert report.labels == _brute_force_labels(hotspots, dated)


@functools.lru_cache(maxsize=None)
def _dated_scene():
    cfg = SceneConfig(n_points=800, n_fires=8, with_patches=False)
    hotspots, areas, _, _ = generate_synthetic_scene(cfg, seed=11)
    dated, _ = label_campaign(hotspots, areas)
    return tuple(hotspots), tuple(dated)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_labels_ignore_input_order(seed):
    hotspots, dated = _dated_scene()
    reference = label_hotspots(hotspots, dated, build_st_index(hotspots))

    rng = np.random.default_rng(seed)
    shuffled = [hotspots[i] for i in rng.permutation(len(hotspots))]
    areas = [dated[i] for i in rng.permutation(len(dated))]
    report = label_hotspots(shuffled, areas, build_st_index(shuffled))
    assert report.labels == reference.labels
    assert report.matched == reference.matched


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=10), min_size=1, max_size=8))
def test_labels_monotone_in_extinction_date(extra_days):
    hotspots, dated = _dated_scene()
    idx = build_st_index(hotspots)
    before = label_hotspots(hotspots, dated, idx)

    later = [a.with_estimated_end(a.estimated_end
                                  + datetime.timedelta(days=extra_days[k % len(extra_days)]))
             for k, a in enumerate(dated)]
    after = label_hotspots(hotspots, later, idx)
    assert all(after.labels[i] >= v for i, v in before.labels.items())
    assert after.positives >= before.positives
    assert all(after.matched[a.id] >= before.matched[a.id] for a in dated)


def _regular_polygon(lon_c, lat_c, r, n=16):
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return PolygonGeom.from_lonlat(np.column_stack([lon_c + r * np.cos(ang),
                                                    lat_c + r * np.sin(ang)]).tolist())


def _best_time(fn, repeats=3):
    best, out = np.inf, None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def test_indexed_labeling_beats_brute_force():
    rng = np.random.default_rng(0)
    n = 100_000
    lat = rng.uniform(38.0, 42.0, n).tolist()
    lon = rng.uniform(-6.0, 0.0, n).tolist()
    t = (day_start(D0) + rng.uniform(0, 60 * 86400, n)).tolist()
    hotspots = [HotspotRecord(i + 1, GeoPoint(la, lo), ti, 'MODIS')
                for i, (la, lo, ti) in enumerate(zip(lat, lon, t))]

    areas = []
    for k in range(50):
        start = D0 + datetime.timedelta(days=int(rng.integers(0, 50)))
        end = start + datetime.timedelta(days=int(rng.integers(0, 5)))
        poly = _regular_polygon(rng.uniform(-5.8, -0.2), rng.uniform(38.2, 41.8),
                                rng.uniform(0.02, 0.1))
        area = BurnedAreaRecord(f'A{k}', (poly,),
                                TimeInterval(day_start(start), day_start(end) + 86399), 100.0)
        areas.append(area.with_estimated_end(end + datetime.timedelta(days=int(rng.integers(0, 4)))))
    idx = build_st_index(hotspots)

    indexed_s, report = _best_time(lambda: label_hotspots(hotspots, areas, idx))
    brute_s, expected = _best_time(lambda: _brute_force_labels(hotspots, areas))
    assert report.labels == expected
    assert report.positives > 0
    assert brute_s >= 5 * indexed_s

def test_labels_recover_synthetic_truth():
    cfg = SceneConfig(n_points=1000, n_fires=10, with_patches=False)
    hotspots, areas, _, truth = generate_synthetic_scene(cfg, seed=0)
    dated, report = label_campaign(hotspots, areas)

    assert report.labels == truth.label_of()
    extinct = {f['id']: f['extinct'] for f in truth.fires}
    for a in dated:
        assert a.estimated_end.isoformat() == extinct[a.id]

    labeled = apply_labels(hotspots, report)
    assert [h.label for h in labeled] == truth.labels.tolist()
    assert all(h.label is None for h in hotspots)
    s = report.summary()
    assert s['positives'] == 100 and s['total'] == 1000
