"""Minimal differentiable tensor engine."""

from .gradcheck import GradCheckResult, gradient_check
from .ops import (
    add,
    concat_channels,
    conv2d,
    l2_loss,
    pixel_shuffle,
    pixel_unshuffle,
    relu,
    scale,
)
from .optim import Adam, AdamState, adam_step
from .serialization import load_checkpoint, load_tensor, save_checkpoint, save_tensor
from .tensor import Graph, OpRecord, Parameter, Tensor, backward

__all__ = [
    "Adam",
    "AdamState",
    "GradCheckResult",
    "Graph",
    "OpRecord",
    "Parameter",
    "Tensor",
    "adam_step",
    "add",
    "backward",
    "concat_channels",
    "conv2d",
    "gradient_check",
    "l2_loss",
    "load_checkpoint",
    "load_tensor",
    "pixel_shuffle",
    "pixel_unshuffle",
    "relu",
    "save_checkpoint",
    "save_tensor",
    "scale",
]
