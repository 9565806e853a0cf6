"""Per-pixel dynamic convolution, with and without integrated upsampling."""

from .layout import PerPixelKernels, kernel_channel, tap_index
from .ops import dynamic_conv, dynamic_conv_backward, dynamic_conv_upsample
from .reference import dynamic_conv_reference

__all__ = [
    "PerPixelKernels",
    "dynamic_conv",
    "dynamic_conv_backward",
    "dynamic_conv_reference",
    "dynamic_conv_upsample",
    "kernel_channel",
    "tap_index",
]
