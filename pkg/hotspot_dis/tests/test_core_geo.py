import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hotspot_dis.core.geo import GeoPoint, TimeInterval, PolygonGeom, \
    points_in_polygon, point_in_polygon, haversine, haversine_distance, \
    STIndex, build_st_index, query_radius_time, query_polygon_time, \
    AntimeridianError, DuplicateIdError, normalize_lon


def test_haversine_known_values():
    # One degree of latitude on the mean sphere
    d = haversine_distance(GeoPoint(0, 0), GeoPoint(1, 0))
    assert np.isclose(d, 111195.08, atol=1.0)

    # Quarter of the equator
    d = haversine_distance(GeoPoint(0, 0), GeoPoint(0, 90))
    assert np.isclose(d, np.pi / 2 * 6371008.8, rtol=1e-9)

    assert haversine_distance(GeoPoint(40, -3), GeoPoint(40, -3)) == 0.0


def test_haversine_symmetric_and_wraps():
    a = GeoPoint(10, 179.9)
    b = GeoPoint(10, -179.9)
    assert np.isclose(haversine_distance(a, b), haversine_distance(b, a))
    assert haversine_distance(a, b) < 25000


def test_geopoint_validation():
    with pytest.raises(ValueError):
        GeoPoint(91, 0)
    with pytest.raises(ValueError):
        GeoPoint(np.nan, 0)
    assert GeoPoint(0, 190).lon == -170
    assert np.allclose(normalize_lon([-180, 179.5, 180, 540]), [-180, 179.5, -180, -180])


def test_time_interval():
    iv = TimeInterval(10, 20)
    assert np.array_equal(iv.contains([9, 10, 15, 20, 21]), [False, True, True, True, False])
    with pytest.raises(ValueError):
        TimeInterval(5, 4)


def test_point_in_square_and_hole():
    square = [[0, 0], [10, 0], [10, 10], [0, 10]]
    hole = [[4, 4], [6, 4], [6, 6], [4, 6]]
    poly = PolygonGeom.from_lonlat(square, [hole])

    assert point_in_polygon(GeoPoint(1, 1), poly)
    assert not point_in_polygon(GeoPoint(5, 5), poly)
    assert not point_in_polygon(GeoPoint(11, 5), poly)
    # Boundary points count as inside, hole boundary included
    assert point_in_polygon(GeoPoint(0, 5), poly)
    assert point_in_polygon(GeoPoint(4, 5), poly)
    assert point_in_polygon(GeoPoint(10, 10), poly)


def test_polygon_closing_vertex_and_bbox():
    ring = [[0, 0], [2, 0], [2, 1], [0, 1], [0, 0]]
    poly = PolygonGeom.from_lonlat(ring)
    assert len(poly.exterior) == 4
    assert poly.bbox == (0, 0, 2, 1)
    assert len(poly.to_lonlat()[0]) == 4


def test_polygon_rejects_degenerate_and_antimeridian():
    with pytest.raises(ValueError):
        PolygonGeom.from_lonlat([[0, 0], [1, 1], [0, 0]])
    with pytest.raises(AntimeridianError):
        PolygonGeom.from_lonlat([[179, 0], [-179, 0], [-179, 1], [179, 1]])


def _random_records(rng, n):
    lat = rng.uniform(39.5, 40.5, n)
    lon = rng.uniform(-3.5, -2.5, n)
    t = rng.uniform(0, 10 * 86400, n)
    return np.arange(1, n + 1), lat, lon, t


def test_radius_query_matches_brute_force():
    rng = np.random.default_rng(3)
    ids, lat, lon, t = _random_records(rng, 2000)
    idx = STIndex(ids, lat, lon, t)
    for _ in range(20):
        c = GeoPoint(rng.uniform(39.5, 40.5), rng.uniform(-3.5, -2.5))
        r = rng.uniform(0, 20000)
        iv = TimeInterval(*np.sort(rng.uniform(0, 10 * 86400, 2)))
        expected = set(ids[(haversine(c.lat, c.lon, lat, lon) <= r) & iv.contains(t)].tolist())
        assert query_radius_time(idx, c, r, iv) == expected


def test_polygon_query_matches_brute_force():
    rng = np.random.default_rng(4)
    ids, lat, lon, t = _random_records(rng, 2000)
    idx = STIndex(ids, lat, lon, t)
    poly = PolygonGeom.from_lonlat([[-3.2, 39.8], [-2.8, 39.9], [-2.9, 40.3], [-3.3, 40.1]])
    iv = TimeInterval(86400, 5 * 86400)
    expected = set(ids[points_in_polygon(lon, lat, poly) & iv.contains(t)].tolist())
    assert query_polygon_time(idx, poly, iv) == expected


def test_radius_index_beats_brute_force():
    rng = np.random.default_rng(8)
    ids, lat, lon, t = _random_records(rng, 100_000)
    idx = STIndex(ids, lat, lon, t)
    queries = [(GeoPoint(rng.uniform(39.5, 40.5), rng.uniform(-3.5, -2.5)),
                rng.uniform(0, 2000),
                TimeInterval(*np.sort(rng.uniform(0, 10 * 86400, 2))))
               for _ in range(200)]

    start = time.perf_counter()
    found = [query_radius_time(idx, c, r, iv) for c, r, iv in queries]
    indexed_s = time.perf_counter() - start

    start = time.perf_counter()
    expected = [set(ids[(haversine(c.lat, c.lon, lat, lon) <= r) & iv.contains(t)].tolist())
                for c, r, iv in queries]
    brute_s = time.perf_counter() - start

    assert found == expected
    assert sum(len(s) for s in found) > 0
    assert brute_s >= 10 * indexed_s


def test_radius_query_across_antimeridian():
    idx = STIndex([1, 2, 3], [0, 0, 0], [179.995, -179.995, 170], [0, 0, 0])
    found = idx.query_radius_time(GeoPoint(0, 180), 1000, TimeInterval(0, 0))
    assert found == {1, 2}


def test_index_edge_cases():
    empty = STIndex([], [], [], [])
    assert len(empty) == 0
    assert empty.query_radius_time(GeoPoint(0, 0), 1e6, TimeInterval(0, 1)) == set()

    with pytest.raises(DuplicateIdError):
        STIndex([1, 1], [0, 1], [0, 1], [0, 0])
    with pytest.raises(ValueError):
        STIndex([1, 2], [0], [0, 1], [0, 0])
    idx = STIndex([1], [0], [0], [0])
    with pytest.raises(ValueError):
        idx.query_radius_time(GeoPoint(0, 0), -1, TimeInterval(0, 1))
    # Zero radius finds the exact point only
    assert idx.query_radius_time(GeoPoint(0, 0), 0, TimeInterval(0, 0)) == {1}


def test_build_from_tuples():
    recs = [(7, GeoPoint(1, 1), 5.0), (8, GeoPoint(1.001, 1), 6.0)]
    idx = build_st_index(recs)
    assert idx.query_radius_time(GeoPoint(1, 1), 500, TimeInterval(0, 5)) == {7}
    assert not idx.ids.flags.writeable


@settings(max_examples=50, deadline=None)
@given(st.floats(-80, 80), st.floats(-179, 179), st.floats(0, 5e5))
def test_radius_query_hypothesis(lat0, lon0, radius):
    rng = np.random.default_rng(0)
    lat = np.clip(lat0 + rng.normal(0, 2, 300), -89, 89)
    lon = lon0 + rng.normal(0, 2, 300)
    ids = np.arange(300)
    idx = STIndex(ids, lat, lon, np.zeros(300))
    c = GeoPoint(lat0, lon0)
    expected = set(ids[haversine(lat0, lon0, lat, lon) <= radius].tolist())
    assert idx.query_radius_time(c, radius, TimeInterval(0, 0)) == expected
