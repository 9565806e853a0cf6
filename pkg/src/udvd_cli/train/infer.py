"""Non-blind inference with a known (or guessed) degradation."""

import logging
from typing import Optional, Tuple

from ..degrade import (
    DegradationParams,
    PcaBasis,
    bicubic_upsample,
    default_basis,
    encode_degradation,
    encode_degradation_spatial,
    spatial_schedule,
)
from ..degrade.kernels import gaussian_kernel
from ..errors import ConfigError
from ..model import Udvd
from ..tensor import Tensor

logger = logging.getLogger(__name__)


def _basis_for(model: Udvd, basis: Optional[PcaBasis]) -> PcaBasis:
    basis = basis or default_basis(model.config.pca_dim)
    if basis.dim != model.config.pca_dim:
        raise ConfigError(f"basis has {basis.dim} components, model expects {model.config.pca_dim}")
    return basis


def infer_with_map(model: Udvd, lr: Tensor, dmap: Tensor) -> Tensor:
    """Final-stage SR output for an explicit degradation map."""
    return model.forward(lr, dmap).final


def infer(
    model: Udvd, lr: Tensor, params: DegradationParams, basis: Optional[PcaBasis] = None
) -> Tensor:
    """
    Super-resolve ``lr`` given its degradation parameters.

    Args:
        model: Trained network
        lr: (n, c, h, w) LR image
        params: Ground-truth or user-guessed degradation; its scale must match the model
        basis: PCA basis for the map (default basis when omitted)

    Returns:
        (n, c, s*h, s*w) SR image, unclipped
    """
    if params.scale != model.config.scale:
        raise ConfigError(f"model upscales x{model.config.scale}, request asks for x{params.scale}")
    basis = _basis_for(model, basis)
    h, w = lr.shape[2:]
    dmap = encode_degradation(gaussian_kernel(params.kernel_width), params.noise_level, basis, h, w)
    return infer_with_map(model, lr, dmap)


def infer_spatial(
    model: Udvd,
    lr: Tensor,
    width_range: Tuple[float, float],
    noise_range: Tuple[float, float],
    basis: Optional[PcaBasis] = None,
) -> Tensor:
    """Inference with a map whose degradation ramps from the left to the right edge."""
    basis = _basis_for(model, basis)
    h, w = lr.shape[2:]
    schedule = spatial_schedule(w, width_range, noise_range)
    dmap = encode_degradation_spatial(schedule.widths, schedule.noise_levels, basis, h)
    return infer_with_map(model, lr, dmap)


def bicubic_baseline(lr: Tensor, scale: int) -> Tensor:
    """Plain bicubic upsampling, the comparison floor for the network."""
    return bicubic_upsample(lr, scale)
