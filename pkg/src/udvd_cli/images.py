"""PNG in/out. Images live in memory as (1, 3, H, W) float32 tensors in [0, 1]."""

from pathlib import Path
from typing import List

import numpy as np
from PIL import Image

from .tensor import Tensor

PNG_SUFFIXES = {".png"}


def read_png(path: Path) -> Tensor:
    """Load an 8-bit image as RGB."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return Tensor(arr.transpose(2, 0, 1)[None])


def to_uint8(img: Tensor) -> np.ndarray:
    """(1, 3, H, W) or (3, H, W) in [0, 1] -> (H, W, 3) uint8; clips and rounds."""
    arr = img.data
    if arr.ndim == 4:
        arr = arr[0]
    arr = np.clip(arr, 0.0, 1.0) * 255.0
    return np.ascontiguousarray(np.round(arr).astype(np.uint8).transpose(1, 2, 0))


def write_png(path: Path, img: Tensor) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(img)).save(path, format="PNG")


def write_gray_png(path: Path, arr: np.ndarray) -> None:
    """Write a 2-D uint8 array."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(arr, dtype=np.uint8)).save(path, format="PNG")


def list_pngs(directory: Path) -> List[Path]:
    """PNG files in ``directory``, sorted by name so ordering is platform-independent."""
    return sorted(p for p in Path(directory).iterdir() if p.suffix.lower() in PNG_SUFFIXES)


def mod_crop(img: Tensor, scale: int) -> Tensor:
    """Crop bottom/right so both spatial dims are multiples of ``scale``."""
    h, w = img.shape[-2:]
    return Tensor(img.data[..., : h - h % scale, : w - w % scale])
