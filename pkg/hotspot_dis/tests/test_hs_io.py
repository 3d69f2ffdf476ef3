import datetime
import os.path as op
import struct
import warnings

import numpy as np
import pytest

from hotspot_dis.core.geo import GeoPoint
from hotspot_dis.core.records import HotspotRecord, RasterPatch, Sensor
from hotspot_dis.utils.hs_io import read_hotspot_csv, write_hotspot_csv, HotspotFormatError, \
    read_burned_areas, write_burned_areas, BurnedAreaFormatError, \
    read_patch_store, write_patch_store, PatchStoreError, read_scene, write_scene
from hotspot_dis.utils.hs_io.csv_io import parse_datetime, format_datetime
from hotspot_dis.utils.hs_io.patch_io import sidecar_name

testsPath = op.dirname(__file__)
data = {'hotspots': op.join(testsPath, 'testdata/hotspots.csv'),
        'areas': op.join(testsPath, 'testdata/burned_areas.geojson')}


def _patch(pid, seed=0):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(32, 32, 33)).astype(np.float32)
    values[:, :, 32] = rng.integers(1, 10, size=(32, 32))
    return RasterPatch(pid, values)


def test_datetime_parsing():
    t = parse_datetime('2019-07-01T12:30:00Z')
    assert t == 1561984200.0
    assert format_datetime(t) == '2019-07-01T12:30:00Z'
    with pytest.raises(ValueError):
        parse_datetime('2019-07-01 12:30')


def test_read_hotspot_csv():
    hs = read_hotspot_csv(data['hotspots'])
    assert [h.id for h in hs] == [1, 2, 3]
    assert hs[0].sensor is Sensor.MODIS
    assert hs[0].bands == {'t_21': 330.5, 't_31': 300.1}
    assert hs[1].confidence is None
    assert hs[2].frp is None
    assert all(h.label is None for h in hs)
    assert np.isclose(hs[1].point.lat, 40.11)


def test_invalid_rows_dropped_or_rejected(tmp_path):
    fname = tmp_path / 'bad.csv'
    fname.write_text('id,latitude,longitude,acq_datetime,sensor,t_21\n'
                     '1,40,-3,2019-07-01T00:00:00Z,MODIS,320\n'
                     '2,95,-3,2019-07-01T00:00:00Z,MODIS,320\n'
                     '3,40,-3,2019-07-01T00:00:00Z,GOES,320\n'
                     '4,40,-3,yesterday,MODIS,320\n')
    with pytest.warns(UserWarning, match='Rejected 3 row'):
        hs = read_hotspot_csv(str(fname))
    assert [h.id for h in hs] == [1]

    with pytest.raises(HotspotFormatError, match='line 3'):
        read_hotspot_csv(str(fname), strict=True)


def test_band_of_other_sensor_rejected(tmp_path):
    fname = tmp_path / 'bands.csv'
    fname.write_text('id,latitude,longitude,acq_datetime,sensor,t_i4\n'
                     '1,40,-3,2019-07-01T00:00:00Z,MODIS,320\n')
    with pytest.raises(HotspotFormatError):
        read_hotspot_csv(str(fname), strict=True)


def test_missing_mandatory_column(tmp_path):
    fname = tmp_path / 'cols.csv'
    fname.write_text('id,latitude,longitude,sensor\n1,40,-3,MODIS\n')
    with pytest.raises(HotspotFormatError, match='acq_datetime'):
        read_hotspot_csv(str(fname))


def test_write_hotspot_csv_keeps_values(tmp_path):
    hs = [HotspotRecord(10, GeoPoint(40.123456789, -3.5), 1561984200.0, 'VIIRS375',
                        frp=1.25, bands={'t_i4': 330.0}, label=1),
          HotspotRecord(11, GeoPoint(-10, 20), 1561984260.0, 'MODIS', label=0)]
    fname = str(tmp_path / 'out.csv')
    write_hotspot_csv(fname, hs)
    back = read_hotspot_csv(fname)
    assert back == hs


def test_read_burned_areas_skips_small():
    with pytest.warns(UserWarning, match='ba2'):
        areas = read_burned_areas(data['areas'])
    assert len(areas) == 1
    a = areas[0]
    assert a.id == 'ba1'
    assert a.area_ha == 120.0
    assert str(a.start_date) == '2019-07-01'
    assert str(a.end_date) == '2019-07-05'
    assert a.contains(-3.2, 40.1)
    assert not a.contains(-3.4, 40.1)
    assert a.estimated_end is None


def test_burned_area_errors(tmp_path):
    fname = tmp_path / 'ba.geojson'
    fname.write_text('{"type": "Feature"}')
    with pytest.raises(BurnedAreaFormatError):
        read_burned_areas(str(fname))

    fname.write_text('{"type": "FeatureCollection", "features": [{"type": "Feature", '
                     '"properties": {"id": 1, "start_date": "2019-07-05", '
                     '"end_date": "2019-07-01", "area_ha": 50}, "geometry": null}]}')
    with pytest.raises(BurnedAreaFormatError, match='before start'):
        read_burned_areas(str(fname))


def test_write_burned_areas_with_estimate(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        areas = read_burned_areas(data['areas'])
    areas = [areas[0].with_estimated_end(datetime.date(2019, 7, 3))]
    fname = str(tmp_path / 'dated.geojson')
    write_burned_areas(fname, areas)
    back = read_burned_areas(fname)
    assert back[0].estimated_end == datetime.date(2019, 7, 3)
    assert back[0].reported == areas[0].reported


def test_patch_store(tmp_path):
    patches = [_patch(5, 0), _patch(2**40, 1)]
    patches[1].gap_filled = True
    fname = str(tmp_path / 'p.hspt')
    write_patch_store(fname, patches)
    assert op.exists(sidecar_name(fname))
    assert sidecar_name(fname).endswith('p.json')

    back = read_patch_store(fname)
    assert [p.hotspot_id for p in back] == [5, 2**40]
    assert np.array_equal(back[0].values, patches[0].values)
    assert back[1].gap_filled and not back[0].gap_filled


def test_patch_store_errors(tmp_path):
    fname = str(tmp_path / 'p.hspt')
    write_patch_store(fname, [_patch(1)])
    with open(fname, 'rb') as f:
        buf = f.read()

    bad = str(tmp_path / 'bad.hspt')
    with open(bad, 'wb') as f:
        f.write(b'XXXX' + buf[4:])
    with pytest.raises(PatchStoreError, match='magic'):
        read_patch_store(bad)

    with open(bad, 'wb') as f:
        f.write(buf[:-10])
    with pytest.raises(PatchStoreError, match='truncated'):
        read_patch_store(bad)

    with open(bad, 'wb') as f:
        f.write(buf + b'\x00')
    with pytest.raises(PatchStoreError, match='trailing'):
        read_patch_store(bad)

    # Wrong shape is only rejected when validating
    small = struct.pack('<4sHI', b'HSPT', 1, 1) + struct.pack('<QHHH', 9, 2, 2, 1) \
        + np.zeros(4, dtype='<f4').tobytes()
    with open(bad, 'wb') as f:
        f.write(small)
    with pytest.raises(PatchStoreError, match='shape'):
        read_patch_store(bad)
    assert read_patch_store(bad, validate=False)[0].values.shape == (2, 2, 1)


def test_write_patch_store_validates(tmp_path):
    p = _patch(1)
    p.values[0, 0, 32] = 12
    fname = str(tmp_path / 'p.hspt')
    with pytest.raises(ValueError):
        write_patch_store(fname, [_patch(2), _patch(3, 1), p])
    assert not op.exists(fname)
    assert not op.exists(sidecar_name(fname))

    # An existing store is left as it was
    write_patch_store(fname, [_patch(2)])
    with pytest.raises(ValueError):
        write_patch_store(fname, [_patch(4), p])
    assert [q.hotspot_id for q in read_patch_store(fname)] == [2]


def test_scene_folder(tmp_path):
    hs = read_hotspot_csv(data['hotspots'])
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        areas = read_burned_areas(data['areas'])
    write_scene(str(tmp_path), hs, areas, None)
    scene = read_scene(str(tmp_path))
    assert scene.hotspots == hs
    assert len(scene.areas) == 1
    assert scene.patches == []
    assert scene.truth is None
