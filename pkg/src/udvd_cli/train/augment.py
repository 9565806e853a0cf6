"""The eight flip/rotation augmentations of a square patch.

Index ``a`` in 0..7 means: rotate by ``a % 4`` quarter turns, then flip
left-right when ``a >= 4``.
"""

from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from ..errors import ParameterError

AUGMENT_COUNT = 8


def _check(index: int) -> None:
    if not 0 <= index < AUGMENT_COUNT:
        raise ParameterError(f"augmentation index must be in 0..7, got {index}")


def apply_augment(arr: np.ndarray, index: int) -> np.ndarray:
    """Augment the last two axes of ``arr``."""
    _check(index)
    out = np.rot90(arr, k=index % 4, axes=(-2, -1))
    if index >= 4:
        out = np.flip(out, axis=-1)
    return np.ascontiguousarray(out)


def invert_augment(arr: np.ndarray, index: int) -> np.ndarray:
    _check(index)
    out = np.flip(arr, axis=-1) if index >= 4 else arr
    return np.ascontiguousarray(np.rot90(out, k=-(index % 4), axes=(-2, -1)))


@lru_cache(maxsize=1)
def _composition_table() -> Dict[Tuple[int, int], int]:
    probe = np.arange(9).reshape(3, 3)
    images = {apply_augment(probe, a).tobytes(): a for a in range(AUGMENT_COUNT)}
    table = {}
    for first in range(AUGMENT_COUNT):
        for second in range(AUGMENT_COUNT):
            composed = apply_augment(apply_augment(probe, first), second)
            table[first, second] = images[composed.tobytes()]
    return table


def compose_augment(first: int, second: int) -> int:
    """Index equivalent to applying ``first`` then ``second``."""
    _check(first)
    _check(second)
    return _composition_table()[first, second]
