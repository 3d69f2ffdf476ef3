import numpy as np
import pytest

from hotspot_dis.utils.synthetic import generate_synthetic_scene, SceneConfig, \
    InfeasibleSceneError
from hotspot_dis.utils.synthetic.synthetic import truth_consistent
from hotspot_dis.utils.constants import PATCH_SIZE, PATCH_CHANNELS, PATCH_CENTER, \
    LULC_CHANNEL, SECONDS_PER_DAY


def test_scene_counts():
    cfg = SceneConfig(n_points=1000, n_fires=10, positive_fraction=0.1, with_patches=False)
    hotspots, areas, patches, truth = generate_synthetic_scene(cfg, seed=1)

    assert len(hotspots) == 1000
    assert len(areas) == 10
    assert patches == []
    assert [h.id for h in hotspots] == list(range(1, 1001))
    assert truth.labels.sum() == 100
    kinds, counts = np.unique(truth.kinds, return_counts=True)
    counts = dict(zip(kinds, counts))
    assert counts == {'fire': 100, 'industrial': 225, 'glint': 90, 'late': 45, 'clutter': 540}
    assert all(h.label is None for h in hotspots)
    assert all(a.area_ha >= 30 for a in areas)


def test_scene_is_consistent_and_deterministic():
    cfg = SceneConfig(n_points=400, n_fires=6, with_patches=False)
    h1, a1, _, t1 = generate_synthetic_scene(cfg, seed=7)
    h2, a2, _, t2 = generate_synthetic_scene(cfg, seed=7)
    h3, _, _, _ = generate_synthetic_scene(cfg, seed=8)
    assert truth_consistent(h1, a1, t1)
    assert h1 == h2
    assert np.array_equal(t1.labels, t2.labels)
    assert h1 != h3


def test_scene_patches():
    cfg = SceneConfig(n_points=20, n_fires=2, positive_fraction=0.5, gap_fraction=0.05)
    with pytest.warns(UserWarning, match='filled'):
        hotspots, _, patches, truth = generate_synthetic_scene(cfg, seed=2)
    assert [p.hotspot_id for p in patches] == [h.id for h in hotspots]
    for p in patches:
        assert p.values.shape == (PATCH_SIZE, PATCH_SIZE, PATCH_CHANNELS)
        assert p.gap_filled
        assert np.isfinite(p.values).all()

    # Fire channel blob stands out at the centre of positive patches
    fire = [p for p, lab in zip(patches, truth.labels) if lab == 1]
    centre = np.mean([p.values[16, 16, 9] for p in fire])
    corner = np.mean([p.values[0, 0, 9] for p in fire])
    assert centre > corner + 1


def test_truth_frame():
    cfg = SceneConfig(n_points=50, n_fires=2, with_patches=False)
    _, _, _, truth = generate_synthetic_scene(cfg, seed=0)
    df = truth.to_frame()
    assert list(df.columns) == ['id', 'label', 'kind']
    assert len(df) == 50
    assert truth.label_of()[int(df['id'][0])] == int(df['label'][0])
    assert len(truth.fires) == 2


def test_infeasible_scenes():
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(n_points=100, n_fires=0, positive_fraction=0.2))
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(industrial_fraction=0.6, glint_fraction=0.5))
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(positive_fraction=1.5))
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(lat_range=(40, 40.3), lon_range=(0, 0.3)))
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(fire_radius_km=(20, 30)))
    with pytest.raises(InfeasibleSceneError):
        generate_synthetic_scene(SceneConfig(glint_hour=24.0))


def test_scene_config_from_dict():
    cfg = SceneConfig.from_dict({'n_points': 10, 'lat_range': [0, 5]})
    assert cfg.lat_range == (0, 5)
    with pytest.raises(ValueError):
        SceneConfig.from_dict({'points': 10})


def test_empty_scene():
    cfg = SceneConfig(n_points=0, with_patches=False)
    hotspots, areas, _, truth = generate_synthetic_scene(cfg)
    assert hotspots == []
    assert truth.labels.size == 0


def test_benchmark_scene():
    cfg = SceneConfig.benchmark(with_patches=False)
    assert cfg.n_points == 1200 and cfg.industrial_mimic and cfg.glint_hour == 13.5
    hotspots, areas, _, truth = generate_synthetic_scene(cfg, seed=0)
    kinds, counts = np.unique(truth.kinds, return_counts=True)
    assert dict(zip(kinds, counts)) == \
        {'fire': 240, 'industrial': 96, 'glint': 288, 'late': 48, 'clutter': 528}
    assert len(areas) == 12
    assert truth_consistent(hotspots, areas, truth)

    hour = np.array([np.mod(h.time, SECONDS_PER_DAY) / 3600 for h in hotspots])
    glint = hour[truth.kinds == 'glint']
    assert np.all(np.abs(glint - 13.5) < 2.5)
    assert abs(np.median(glint) - 13.5) < 0.25

    # Fire-like industrial FRP: no order of magnitude above the fires any more
    frp = np.array([np.nan if h.frp is None else h.frp for h in hotspots])
    ind = np.nanmedian(frp[truth.kinds == 'industrial'])
    fire = np.nanmedian(frp[truth.kinds == 'fire'])
    assert 0.5 < ind / fire < 2.0
    assert truth.config['industrial_mimic']
    assert SceneConfig().glint_hour is None and not SceneConfig().industrial_mimic


def test_mimic_industrial_patches():
    cfg = SceneConfig.benchmark(n_points=200, n_fires=4)
    _, _, patches, truth = generate_synthetic_scene(cfg, seed=3)
    ind = [p for p, k in zip(patches, truth.kinds) if k == 'industrial']
    assert ind
    # Vegetation cover and the fire channel blob, like a wildfire
    assert all(p.values[PATCH_CENTER[0], PATCH_CENTER[1], LULC_CHANNEL] in (2, 9, 4)
               for p in ind)
    centre = np.mean([p.values[PATCH_CENTER[0], PATCH_CENTER[1], 9] for p in ind])
    corner = np.mean([p.values[0, 0, 9] for p in ind])
    assert centre > corner + 2
