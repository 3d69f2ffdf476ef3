from hotspot_dis.utils.synthetic.synthetic import generate_synthetic_scene, SceneConfig, \
    SyntheticTruth, InfeasibleSceneError  # noqa: F401
