"""Patch sampling and counter-keyed batch synthesis."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..degrade import DegradationParams, PcaBasis, default_basis, degrade, encode_degradation
from ..degrade.kernels import gaussian_kernel
from ..degrade.noise import counter_rng, stream_id
from ..errors import ImageTooSmallError
from ..images import list_pngs, read_png
from ..tensor import Tensor
from .augment import AUGMENT_COUNT, apply_augment
from .config import TrainConfig

logger = logging.getLogger(__name__)

# sub-streams of one batch item
_PICK, _CROP = 1, 2


@dataclass(frozen=True)
class PatchRegion:
    """Square HR crop; ``top`` and ``left`` are multiples of the scale."""
    top: int
    left: int
    size: int

    def crop(self, arr: np.ndarray) -> np.ndarray:
        return arr[..., self.top : self.top + self.size, self.left : self.left + self.size]

    def lr_region(self, scale: int) -> "PatchRegion":
        return PatchRegion(self.top // scale, self.left // scale, self.size // scale)


def sample_patch(
    hr: Tensor, scale: int, seed: int, patch_lr: int = 48, stream: int = 0
) -> Tuple[Tensor, PatchRegion, int]:
    """
    Crop an HR patch aligned to the LR grid and apply a random augmentation.

    Args:
        hr: (1, c, H, W) image
        scale: Downsampling factor; the patch is ``patch_lr * scale`` pixels
        seed: Master seed
        patch_lr: LR patch size
        stream: Stream id, so different items draw independently

    Returns:
        (augmented patch, crop region, augmentation index)
    """
    size = patch_lr * scale
    h, w = hr.shape[2:]
    if h < size or w < size:
        raise ImageTooSmallError(f"image {h}x{w} is smaller than a {size}x{size} patch", hr.shape)
    rng = counter_rng(seed, stream)
    top = scale * int(rng.integers(0, (h - size) // scale + 1))
    left = scale * int(rng.integers(0, (w - size) // scale + 1))
    augment = int(rng.integers(0, AUGMENT_COUNT))
    region = PatchRegion(top, left, size)
    return Tensor(apply_augment(region.crop(hr.data), augment)), region, augment


@dataclass
class Batch:
    """One synthesized training batch; ``streams`` identify every item's randomness."""
    step: int
    lr: Tensor
    hr: Tensor
    dmap: Tensor
    streams: List[int]
    params: List[DegradationParams]


class BatchSynthesizer:
    """Pure function of (config, images, step) producing degraded training batches.

    With ``fixed_patches > 0`` item i of every batch reuses patch
    ``(step * batch + i) % fixed_patches`` with its degradation and noise,
    which gives the small fixed training set of an overfit run.
    """

    def __init__(
        self, images: Sequence[Tensor], cfg: TrainConfig, basis: Optional[PcaBasis] = None
    ):
        self.images = list(images)
        self.cfg = cfg
        self.basis = basis or default_basis(cfg.model.pca_dim)
        self.usable = [
            i for i, img in enumerate(self.images)
            if img.shape[2] >= cfg.patch_hr and img.shape[3] >= cfg.patch_hr
        ]
        skipped = len(self.images) - len(self.usable)
        if skipped:
            logger.warning("skipping %d images smaller than %d pixels", skipped, cfg.patch_hr)
        if not self.usable:
            raise ImageTooSmallError(
                f"no training image holds a {cfg.patch_hr}x{cfg.patch_hr} patch"
            )

    def item_stream(self, step: int, item: int) -> int:
        if self.cfg.fixed_patches:
            return stream_id(0, (step * self.cfg.batch + item) % self.cfg.fixed_patches)
        return stream_id(step, item)

    def item(self, stream: int) -> Tuple[Tensor, Tensor, Tensor, DegradationParams]:
        cfg = self.cfg
        rng = counter_rng(cfg.seed, stream_id(stream, _PICK))
        image = self.images[self.usable[int(rng.integers(0, len(self.usable)))]]
        eps = float(rng.uniform(*cfg.eps_range))
        sigma = float(rng.uniform(*cfg.sigma_range))
        params = DegradationParams(kernel_width=eps, noise_level=sigma, scale=cfg.scale)

        crop_stream = stream_id(stream, _CROP)
        patch, _, _ = sample_patch(image, cfg.scale, cfg.seed, cfg.patch_lr, crop_stream)
        lr = degrade(patch, params, cfg.seed, stream=stream)
        size = cfg.patch_lr
        dmap = encode_degradation(gaussian_kernel(eps), sigma, self.basis, size, size)
        return patch, lr, dmap, params

    def batch(self, step: int) -> Batch:
        streams = [self.item_stream(step, i) for i in range(self.cfg.batch)]
        if self.cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                items = list(pool.map(self.item, streams))
        else:
            items = [self.item(s) for s in streams]
        return Batch(
            step=step,
            hr=Tensor(np.concatenate([hr.data for hr, _, _, _ in items])),
            lr=Tensor(np.concatenate([lr.data for _, lr, _, _ in items])),
            dmap=Tensor(np.stack([d.data for _, _, d, _ in items])),
            streams=streams,
            params=[p for _, _, _, p in items],
        )

    def iterate(self, first: int, last: int) -> Iterator[Batch]:
        """Batches for steps ``first..last``; the next one is built while the caller trains."""
        if first > last:
            return
        with ThreadPoolExecutor(max_workers=1) as pool:
            pending = pool.submit(self.batch, first)
            for step in range(first, last + 1):
                current = pending.result()
                if step < last:
                    pending = pool.submit(self.batch, step + 1)
                yield current


def load_training_images(data_dir: Path) -> List[Tensor]:
    """All PNGs of ``data_dir`` in sorted order."""
    paths = list_pngs(data_dir)
    if not paths:
        raise FileNotFoundError(f"no PNG images in {data_dir}")
    return [read_png(p) for p in paths]
