from hotspot_dis.utils.patchnet.nets import PatchCNN, FusionNet, forward  # noqa: F401
from hotspot_dis.utils.patchnet.normalizer import PatchNormalizer  # noqa: F401
from hotspot_dis.utils.patchnet.train import TrainConfig, train_patch_net  # noqa: F401
