"""The degradation model: blur, bicubic downsample, then AWGN."""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..errors import ParameterError, ShapeError
from ..tensor import Tensor
from .kernels import blur, gaussian_kernel
from .noise import add_awgn, apply_noise
from .params import NOISE_RANGE, SCALES, WIDTH_RANGE, DegradationParams
from .resize import bicubic_resize

logger = logging.getLogger(__name__)


def _check_divisible(hr: Tensor, scale: int) -> Tuple[int, int]:
    if hr.ndim != 4:
        raise ShapeError(f"expected an NCHW image, got {hr.shape}")
    h, w = hr.shape[2:]
    if h % scale or w % scale:
        raise ShapeError(f"HR size {h}x{w} is not divisible by scale {scale}; crop it first")
    return h // scale, w // scale


def degrade(hr: Tensor, params: DegradationParams, seed: int, stream: int = 0) -> Tensor:
    """I_LR = (I_HR * k) downsampled by s, plus n."""
    lr_h, lr_w = _check_divisible(hr, params.scale)
    blurred = blur(hr, gaussian_kernel(params.kernel_width))
    down = bicubic_resize(blurred, lr_h, lr_w, antialias=True)
    return add_awgn(down, params.noise_level, seed, stream)


@dataclass(frozen=True)
class SpatialSchedule:
    """Per-LR-column kernel widths and noise levels."""
    widths: np.ndarray
    noise_levels: np.ndarray


def spatial_schedule(
    columns: int, width_range: Tuple[float, float], noise_range: Tuple[float, float]
) -> SpatialSchedule:
    """Linear ramp from ``lo`` at column 0 to ``hi`` at the last column."""
    _check_range("kernel width", width_range, WIDTH_RANGE)
    _check_range("noise level", noise_range, NOISE_RANGE)
    return SpatialSchedule(
        np.linspace(width_range[0], width_range[1], columns),
        np.linspace(noise_range[0], noise_range[1], columns),
    )


def _check_range(label: str, rng: Tuple[float, float], legal: Tuple[float, float]) -> None:
    lo, hi = rng
    if not (legal[0] <= lo <= hi <= legal[1]):
        raise ParameterError(
            f"{label} range ({lo}, {hi}) must satisfy {legal[0]} <= lo <= hi <= {legal[1]}"
        )


def degrade_spatial(
    hr: Tensor,
    width_range: Tuple[float, float],
    noise_range: Tuple[float, float],
    scale: int,
    seed: int,
    stream: int = 0,
) -> Tensor:
    """Degrade with kernel width and noise level varying per LR column.

    Each HR column is blurred with the kernel of the LR column it lands in.
    """
    if scale not in SCALES:
        raise ParameterError(f"scale must be one of {SCALES}, got {scale}")
    lr_h, lr_w = _check_divisible(hr, scale)
    schedule = spatial_schedule(lr_w, width_range, noise_range)

    blurred_by_width: Dict[float, np.ndarray] = {}
    for width in schedule.widths:
        key = float(width)
        if key not in blurred_by_width:
            blurred_by_width[key] = blur(hr, gaussian_kernel(key)).data
    logger.debug("spatial degradation with %d distinct kernels", len(blurred_by_width))

    assembled = np.empty(hr.shape, dtype=hr.dtype)
    for col, width in enumerate(schedule.widths):
        band = slice(col * scale, (col + 1) * scale)
        assembled[..., band] = blurred_by_width[float(width)][..., band]

    down = bicubic_resize(Tensor(assembled, dtype=hr.dtype), lr_h, lr_w, antialias=True)
    return apply_noise(down, schedule.noise_levels / 255.0, seed, stream)
