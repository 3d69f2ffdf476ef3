import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hotspot_dis.core.geo import GeoPoint, build_st_index, haversine
from hotspot_dis.core.records import HotspotRecord, RasterPatch
from hotspot_dis.utils.features import FeatureSetConfig, feature_dimension, feature_names, \
    compute_nph, compute_nph_batch, compute_time_features, encode_lulc, assemble_features, \
    build_feature_matrix, feature_frame, LandCoverError, MissingInputError
from hotspot_dis.utils.hs_io.csv_io import parse_datetime


def _patch(pid, lulc=2):
    values = np.zeros((32, 32, 33), dtype=np.float32)
    values[:, :, :32] = np.arange(32, dtype=np.float32)
    values[16, 16, :32] += 100
    values[:, :, 32] = 9
    values[16, 16, 32] = lulc
    return RasterPatch(pid, values)


def _hotspot(hid=1, t='2019-07-01T12:00:00Z', lat=40.0, lon=-3.0, **kw):
    return HotspotRecord(hid, GeoPoint(lat, lon), parse_datetime(t), 'MODIS', **kw)


def test_feature_dimensions():
    dims = {name: feature_dimension(FeatureSetConfig.preset(name))
            for name in ('FS1', 'FS2', 'FS3', 'FS4', 'FS5', 'FS6')}
    assert dims == {'FS1': 18, 'FS2': 27, 'FS3': 59, 'FS4': 62, 'FS5': 48, 'FS6': 41}
    assert len(set(feature_names(FeatureSetConfig.preset('FS4')))) == 62

    with pytest.raises(ValueError):
        FeatureSetConfig()
    with pytest.raises(ValueError):
        FeatureSetConfig.preset('FS7')
    fs = FeatureSetConfig.from_spec({'sentinel3': True, 'nph': True})
    assert fs.blocks == ('sentinel3', 'nph')


def test_time_features():
    # Monday 00:00 UTC is phase zero for both encodings
    f = compute_time_features(parse_datetime('2019-07-01T00:00:00Z'))
    assert np.allclose(f, [0, 1, 0, 1])
    # Thursday 12:00 is half a week and half a day
    f = compute_time_features(parse_datetime('2019-07-04T12:00:00Z'))
    assert np.allclose(f, [0, -1, 0, -1])
    f = compute_time_features(parse_datetime('2019-07-02T06:00:00Z'))
    w = (30 * 3600) / (7 * 86400)
    assert np.allclose(f, [np.sin(2 * np.pi * w), np.cos(2 * np.pi * w), 1, 0])
    assert compute_time_features(np.zeros(5)).shape == (5, 4)


def test_encode_lulc():
    assert np.array_equal(encode_lulc(1), np.eye(9)[0])
    assert np.array_equal(encode_lulc(9.0), np.eye(9)[8])
    for bad in (0, 10, 2.5):
        with pytest.raises(LandCoverError):
            encode_lulc(bad)


def test_assemble_features_order_and_missing():
    h = _hotspot(frp=12.0, bands={'t_21': 330.0})
    fs = FeatureSetConfig.preset('FS4')
    fv = assemble_features(h, fs, patch=_patch(1, lulc=4), nph=(1, 2, 3))
    assert len(fv) == 62
    v = fv.values
    # frp, t_21 present; other bands zero with absent flags
    assert v[0] == 12.0 and v[1] == 330.0 and v[2] == 0.0
    assert np.array_equal(v[7:14], [1, 1, 0, 0, 0, 0, 0])
    assert np.array_equal(v[18:27], np.eye(9)[3])
    assert np.array_equal(v[27:59], np.arange(32) + 100)
    assert np.array_equal(v[59:], [1, 2, 3])

    with pytest.raises(MissingInputError):
        assemble_features(h, fs, nph=(0, 0, 0))
    with pytest.raises(MissingInputError):
        assemble_features(h, fs, patch=_patch(1))
    bad = _patch(1)
    bad.values[16, 16, 32] = 0
    with pytest.raises(LandCoverError):
        assemble_features(h, FeatureSetConfig.preset('FS6'), patch=bad)


def test_nph_example():
    base = parse_datetime('2019-07-01T12:00:00Z')
    h = HotspotRecord(100, GeoPoint(40, -3), base, 'MODIS')
    near = [(1, -1), (2, -11.99), (3, -12), (4, -13), (5, -24), (6, -30), (7, -36), (8, -37),
            (9, 0), (10, 1)]
    hs = [h] + [HotspotRecord(i, GeoPoint(40.001, -3), base + dh * 3600, 'VIIRS375')
                for i, dh in near]
    # Outside the 1 km radius
    hs.append(HotspotRecord(11, GeoPoint(40.02, -3), base - 3600, 'MODIS'))
    idx = build_st_index(hs)
    assert compute_nph(idx, h) == (3, 5, 7)


def _brute_nph(hs, h, radius=1000.0, windows=(12, 24, 36)):
    out = []
    for w in windows:
        n = 0
        for r in hs:
            if r.id == h.id:
                continue
            d = haversine(h.point.lat, h.point.lon, r.point.lat, r.point.lon)
            if d <= radius and h.time - w * 3600 <= r.time < h.time:
                n += 1
        out.append(n)
    return tuple(out)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_nph_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 80
    lat = 40 + rng.uniform(0, 0.02, n)
    lon = -3 + rng.uniform(0, 0.02, n)
    t = np.floor(rng.uniform(0, 3 * 86400, n))
    hs = [HotspotRecord(i + 1, GeoPoint(lat[i], lon[i]), t[i], 'MODIS') for i in range(n)]
    idx = build_st_index(hs)
    counts = compute_nph_batch(idx, hs)
    for h, c in zip(hs, counts):
        assert tuple(c) == _brute_nph(hs, h)
        assert c[0] <= c[1] <= c[2]


def test_build_feature_matrix():
    hs = [_hotspot(5, label=1), _hotspot(3, t='2019-07-01T13:00:00Z', lat=40.001, label=0),
          _hotspot(8, t='2019-07-01T14:00:00Z', lat=41)]
    patches = [_patch(5), _patch(3), _patch(8)]
    df = build_feature_matrix(hs, FeatureSetConfig.preset('FS4'), patches)
    assert df.shape == (3, 62)
    assert list(df.index) == [5, 3, 8]
    assert df.index.dtype == np.uint64
    assert list(df.loc[3, ['nph12', 'nph24', 'nph36']]) == [1, 1, 1]
    assert list(df.loc[8, ['nph12', 'nph24', 'nph36']]) == [0, 0, 0]

    framed = feature_frame(hs, FeatureSetConfig.preset('FS1'))
    assert list(framed['label']) == [1, 0, -1]
    assert framed.shape == (3, 19)

    empty = build_feature_matrix([], FeatureSetConfig.preset('FS1'))
    assert empty.shape == (0, 18)
