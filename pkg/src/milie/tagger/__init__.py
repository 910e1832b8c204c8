from .base import ALL_KINDS, TaggerModel, TrainingInstance, predict
from .modelfile import FORMAT_VERSION, MAGIC, load, load_file, save, save_file
from .oracle import OracleTagger, oracle_from_gold
from .window import TrainConfig, WindowTagger, featurize, train

__all__ = [
    "ALL_KINDS", "TaggerModel", "TrainingInstance", "predict",
    "FORMAT_VERSION", "MAGIC", "load", "load_file", "save", "save_file",
    "OracleTagger", "oracle_from_gold",
    "TrainConfig", "WindowTagger", "featurize", "train",
]
