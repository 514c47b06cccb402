from recbayes.classifier.checkpoint import load_checkpoint, save_checkpoint
from recbayes.classifier.model import (
    Batch,
    batch_loss,
    encode,
    filter_batch,
    filter_trajectory,
    initial_hidden,
    posterior_step,
    prior,
    recurrent_step,
    sequence_loss,
)
from recbayes.classifier.params import PARAM_ORDER, ClassifierParams, param_shapes
from recbayes.classifier.training import TrainConfig, evaluate, iterate_minibatches, train

__all__ = [
    "Batch",
    "ClassifierParams",
    "PARAM_ORDER",
    "TrainConfig",
    "batch_loss",
    "encode",
    "evaluate",
    "filter_batch",
    "filter_trajectory",
    "initial_hidden",
    "iterate_minibatches",
    "load_checkpoint",
    "param_shapes",
    "posterior_step",
    "prior",
    "recurrent_step",
    "save_checkpoint",
    "sequence_loss",
    "train",
]
