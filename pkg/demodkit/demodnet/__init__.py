"""
DemodNet: a fully convolutional demodulator trained on hard bits whose
sigmoid outputs give log probability ratios for soft decoding, plus the
LLR regression baseline built on the same skeleton.
"""

from ._model import (
    FINAL_KERNEL,
    HEADS,
    MIN_SYMBOLS,
    DemodNetModel,
    build_demodnet,
    features_from_symbols,
    forward,
    forward_stream,
    load_checkpoint,
    lpr,
    predict_logits,
    save_checkpoint,
)
from ._dataset import Dataset, generate_dataset
from ._train import TrainSchedule, train, train_llrnet_baseline
from demodkit.exceptions import TrainingDivergedError
