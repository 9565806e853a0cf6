"""The UDVD network and its multistage loss."""

from .checkpoint import load_model, save_model
from .config import UdvdConfig
from .layers import Conv2d, ConvSpec
from .loss import multistage_loss
from .network import (
    DynamicBlock,
    DynamicBlockOutput,
    Udvd,
    UdvdOutput,
    build_udvd,
    dynamic_block_forward,
    layer_specs,
    parameter_count,
    udvd_forward,
)

__all__ = [
    "Conv2d",
    "ConvSpec",
    "DynamicBlock",
    "DynamicBlockOutput",
    "Udvd",
    "UdvdConfig",
    "UdvdOutput",
    "build_udvd",
    "dynamic_block_forward",
    "layer_specs",
    "load_model",
    "multistage_loss",
    "parameter_count",
    "save_model",
    "udvd_forward",
]
