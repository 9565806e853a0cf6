"""Counter-based random streams and additive white Gaussian noise."""

import numpy as np

from ..errors import ParameterError
from ..tensor import Tensor

_MASK64 = (1 << 64) - 1


def counter_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); the draw index is the counter.

    Independent streams (one per image, per batch item, per step) make results
    independent of the order in which workers consume them.
    """
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def stream_id(*parts: int) -> int:
    """Fold several small counters (step, item, ...) into one 64-bit stream id."""
    acc = 0xCBF29CE484222325
    for part in parts:
        acc ^= part & _MASK64
        acc = (acc * 0x100000001B3) & _MASK64
    return acc


def box_muller(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` standard normal variates via the Box-Muller transform."""
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # (0, 1], keeps log finite
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs, dtype=np.float64)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def gaussian_field(shape: tuple, seed: int, stream: int = 0) -> np.ndarray:
    """Standard normal array, element i drawn from position i of the stream."""
    count = int(np.prod(shape))
    return box_muller(counter_rng(seed, stream), count).reshape(shape)


def apply_noise(img: Tensor, sigma_scale: np.ndarray, seed: int, stream: int = 0) -> Tensor:
    """img + z * sigma_scale, with sigma_scale already on the [0, 1] intensity scale.

    ``sigma_scale`` broadcasts against the image (a scalar, or one value per column).
    """
    if np.all(np.asarray(sigma_scale) == 0):
        return Tensor(img.data, dtype=img.dtype)
    z = gaussian_field(img.shape, seed, stream)
    return Tensor(img.data.astype(np.float64) + z * sigma_scale, dtype=img.dtype)


def add_awgn(img: Tensor, sigma: float, seed: int, stream: int = 0) -> Tensor:
    """Add i.i.d. N(0, (sigma/255)^2) noise; no clipping."""
    if sigma < 0:
        raise ParameterError(f"noise level must be >= 0, got {sigma}")
    return apply_noise(img, np.float64(sigma) / 255.0, seed, stream)
