from hotspot_dis.utils.classifiers.standardize import Standardizer  # noqa: F401
from hotspot_dis.utils.classifiers.optim import AdamW, TrainingDivergedError  # noqa: F401
from hotspot_dis.utils.classifiers.logreg import LRModel, LRParams, train_logreg  # noqa: F401
from hotspot_dis.utils.classifiers.mlp import MLPModel, MLPParams, train_mlp  # noqa: F401
from hotspot_dis.utils.classifiers.gbdt import GBDTModel, GBDTParams, train_gbdt  # noqa: F401
from hotspot_dis.utils.classifiers.serialize import save_model, load_model, predict_proba, \
    ModelFormatError  # noqa: F401
from hotspot_dis.utils.classifiers.tabular import TABULAR_MODELS, fit_tabular  # noqa: F401
