"""Render the per-pixel kernels a dynamic block predicts under two degradation maps."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ParameterError
from ..images import write_gray_png
from ..model import Udvd
from ..tensor import Tensor

logger = logging.getLogger(__name__)

SEPARATOR = 2
SEPARATOR_VALUE = 255


@dataclass
class KernelPanels:
    """Raw (unnormalized) tiled kernels and the assembled uint8 image."""
    under_a: np.ndarray
    under_b: np.ndarray
    difference: np.ndarray
    image: np.ndarray


def block_kernels(model: Udvd, lr: Tensor, dmap: Tensor, block_index: int) -> np.ndarray:
    """(k*k, h, w) kernels of one block for the first image, averaged over its r*r sub-kernels."""
    blocks = model.config.block_rates()
    if not 0 <= block_index < len(blocks):
        raise ParameterError(
            f"block index {block_index} out of range: the model has {len(blocks)} dynamic blocks"
        )
    kernels = model.forward(lr, dmap).blocks[block_index].kernels.data[0].astype(np.float64)
    k2 = model.config.k ** 2
    rate = blocks[block_index]
    return kernels.reshape(rate * rate, k2, *kernels.shape[1:]).mean(axis=0)


def tile_kernels(kernels: np.ndarray, k: int) -> np.ndarray:
    """(k*k, h, w) -> (k*h, k*w); pixel (i, j) becomes the tile at rows i*k.., cols j*k.."""
    _, h, w = kernels.shape
    return kernels.reshape(k, k, h, w).transpose(2, 0, 3, 1).reshape(h * k, w * k)


def normalize_panel(panel: np.ndarray) -> np.ndarray:
    """Stretch to [0, 255]; a constant panel becomes all zeros."""
    lo, hi = float(panel.min()), float(panel.max())
    if hi - lo == 0.0:
        return np.zeros(panel.shape, dtype=np.uint8)
    return np.round((panel - lo) / (hi - lo) * 255.0).astype(np.uint8)


def assemble_panels(*panels: np.ndarray) -> np.ndarray:
    height = panels[0].shape[0]
    gap = np.full((height, SEPARATOR), SEPARATOR_VALUE, dtype=np.uint8)
    pieces = []
    for i, panel in enumerate(panels):
        if i:
            pieces.append(gap)
        pieces.append(panel)
    return np.concatenate(pieces, axis=1)


def kernel_panels(
    model: Udvd, lr: Tensor, map_a: Tensor, map_b: Tensor, block_index: int
) -> KernelPanels:
    k = model.config.k
    under_a = tile_kernels(block_kernels(model, lr, map_a, block_index), k)
    under_b = tile_kernels(block_kernels(model, lr, map_b, block_index), k)
    difference = np.abs(under_a - under_b)
    image = assemble_panels(*(normalize_panel(p) for p in (under_a, under_b, difference)))
    return KernelPanels(under_a, under_b, difference, image)


def export_kernel_viz(
    model: Udvd,
    lr: Tensor,
    map_a: Tensor,
    map_b: Tensor,
    block_index: int,
    out_png: Optional[Path] = None,
) -> KernelPanels:
    """
    Write the kernels under ``map_a``, under ``map_b`` and their absolute difference.

    Each panel is normalized on its own and panels are separated by 2-pixel
    white bars, so the image is (k*h) x (3*k*w + 4) for a block input of h x w.
    """
    panels = kernel_panels(model, lr, map_a, map_b, block_index)
    if out_png is not None:
        write_gray_png(Path(out_png), panels.image)
        logger.info("kernel visualization written to %s", out_png)
    return panels
