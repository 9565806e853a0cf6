"""Synthesize LR/map pairs for a directory of HR images and write a manifest."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, List, Optional, Tuple

from pydantic import BaseModel

from ..images import list_pngs, mod_crop, read_png, write_png
from ..tensor import save_tensor
from .kernels import gaussian_kernel
from .noise import counter_rng
from .params import DegradationParams
from .pca import PcaBasis, default_basis, encode_degradation
from .pipeline import degrade

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class ManifestEntry(BaseModel):
    """One synthesized pair."""
    hr_path: str
    lr_path: str
    map_path: str
    eps: float
    sigma: float
    s: int
    seed: int


def sample_params(
    seed: int,
    index: int,
    width_range: Tuple[float, float],
    noise_range: Tuple[float, float],
    scale: int,
) -> DegradationParams:
    """Uniform draw of (width, noise) from the stream of image ``index``."""
    rng = counter_rng(seed, index)
    width = float(rng.uniform(width_range[0], width_range[1]))
    noise = float(rng.uniform(noise_range[0], noise_range[1]))
    return DegradationParams(kernel_width=width, noise_level=noise, scale=scale)


def synthesize_one(
    hr_path: Path,
    out_dir: Path,
    index: int,
    params: DegradationParams,
    seed: int,
    basis: PcaBasis,
) -> ManifestEntry:
    hr = mod_crop(read_png(hr_path), params.scale)
    lr = degrade(hr, params, seed, stream=index)
    dmap = encode_degradation(
        gaussian_kernel(params.kernel_width), params.noise_level, basis, lr.shape[2], lr.shape[3]
    )
    lr_path = out_dir / f"{hr_path.stem}_x{params.scale}.png"
    map_path = out_dir / f"{hr_path.stem}_x{params.scale}.map.ten"
    write_png(lr_path, lr)
    save_tensor(map_path, dmap)
    return ManifestEntry(
        hr_path=str(hr_path),
        lr_path=str(lr_path),
        map_path=str(map_path),
        eps=params.kernel_width,
        sigma=params.noise_level,
        s=params.scale,
        seed=seed,
    )


def synthesize_dataset(
    hr_dir: Path,
    out_dir: Path,
    width_range: Tuple[float, float],
    noise_range: Tuple[float, float],
    scale: int,
    seed: int,
    basis: Optional[PcaBasis] = None,
    workers: int = 1,
    progress_callback: Optional[Callable[[ManifestEntry], None]] = None,
) -> List[ManifestEntry]:
    """
    Degrade every HR PNG in ``hr_dir`` with uniformly sampled parameters.

    Args:
        hr_dir: Directory of HR PNG images (processed in sorted order)
        out_dir: Destination for LR PNGs, map files and ``manifest.json``
        width_range: Uniform range for the kernel width
        noise_range: Uniform range for the noise level
        scale: Downsampling factor
        seed: Master seed; image i uses stream i
        basis: PCA basis for the maps (default basis when omitted)
        workers: Thread pool size
        progress_callback: Called with each finished entry

    Returns:
        Manifest entries in input order
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    basis = basis or default_basis()
    paths = list_pngs(hr_dir)
    jobs = [
        (path, index, sample_params(seed, index, width_range, noise_range, scale))
        for index, path in enumerate(paths)
    ]
    logger.info("synthesizing %d images with %d workers", len(jobs), workers)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [
            pool.submit(synthesize_one, path, out_dir, index, params, seed, basis)
            for path, index, params in jobs
        ]
        entries = []
        for future in futures:
            entry = future.result()
            if progress_callback:
                progress_callback(entry)
            entries.append(entry)

    manifest = out_dir / MANIFEST_NAME
    manifest.write_text(json.dumps([e.model_dump() for e in entries], indent=2))
    return entries


def load_manifest(path: Path) -> List[ManifestEntry]:
    return [ManifestEntry(**item) for item in json.loads(Path(path).read_text())]
