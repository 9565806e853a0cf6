"""Channel layout of predicted per-pixel kernels.

Typical form, channel-shared: channel = (u+d)*k + (v+d), with d = k // 2.
Typical form, per-channel:    channel = c*k*k + (u+d)*k + (v+d).
Upsampling form (shared):     channel = (x*r + y)*k*k + (u+d)*k + (v+d).

The layout is frozen; checkpoints depend on it.
"""

import math
from dataclasses import dataclass
from typing import Optional

from ..errors import ParameterError, ShapeError
from ..tensor import Tensor


def tap_index(k: int, u: int, v: int) -> int:
    d = k // 2
    if not (-d <= u <= d and -d <= v <= d):
        raise ParameterError(f"offset ({u}, {v}) outside a {k}x{k} window")
    return (u + d) * k + (v + d)


def kernel_channel(k: int, u: int, v: int, r: int = 1, x: int = 0, y: int = 0, c: int = 0) -> int:
    """Channel holding K(u, v) for sub-pixel (x, y) or image channel ``c``."""
    if r > 1:
        return (x * r + y) * k * k + tap_index(k, u, v)
    return c * k * k + tap_index(k, u, v)


@dataclass(frozen=True)
class PerPixelKernels:
    """Validated view of a kernel tensor: (n, k*k*r*r, h, w) or (n, c*k*k, h, w)."""
    values: Tensor
    k: int
    r: int = 1
    channel_shared: bool = True

    @property
    def taps(self) -> int:
        return self.k * self.k

    @classmethod
    def infer(
        cls,
        values: Tensor,
        image_channels: int,
        r: int = 1,
        channel_shared: bool = True,
        k: Optional[int] = None,
    ) -> "PerPixelKernels":
        """Derive k from the channel count and check every layout invariant."""
        if values.ndim != 4:
            raise ShapeError(f"kernels must be 4-D, got shape {values.shape}")
        if r < 1:
            raise ParameterError(f"upsample rate must be >= 1, got {r}")
        if r > 1 and not channel_shared:
            raise ParameterError("upsampling kernels are always shared across channels")
        groups = r * r if channel_shared else image_channels
        channels = values.shape[1]
        if channels % groups:
            raise ShapeError(f"{channels} kernel channels not divisible by {groups}")
        taps = channels // groups
        side = math.isqrt(taps)
        if side * side != taps:
            raise ShapeError(f"{taps} taps per kernel is not a square")
        if k is not None and k != side:
            raise ShapeError(f"kernel tensor holds {side}x{side} kernels, expected {k}x{k}")
        if side % 2 == 0:
            raise ParameterError(f"kernel size must be odd, got {side}")
        return cls(values, side, r, channel_shared)
