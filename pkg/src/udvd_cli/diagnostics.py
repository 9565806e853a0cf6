"""Gradient-check suite and the dynamic-convolution benchmark."""

import logging
import time
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from .dynconv import dynamic_conv, dynamic_conv_reference, dynamic_conv_upsample
from .model import UdvdConfig, build_udvd, multistage_loss
from .tensor import (
    GradCheckResult,
    Tensor,
    concat_channels,
    conv2d,
    gradient_check,
    l2_loss,
    pixel_shuffle,
    relu,
)

logger = logging.getLogger(__name__)

GRADCHECK_STEP = 1e-3
GRADCHECK_RTOL = 1e-3
GRADCHECK_MIN_PASS = 0.99


# =========================================================================
# Gradient suite
# =========================================================================


def _away_from_zero(rng: np.random.Generator, shape: tuple, margin: float = 0.05) -> np.ndarray:
    """Values with |x| >= margin so a finite-difference step never crosses a kink."""
    sign = np.where(rng.random(shape) < 0.5, -1.0, 1.0)
    return sign * (margin + rng.random(shape))


def tiny_udvd_config() -> UdvdConfig:
    return UdvdConfig(n_res_blocks=1, trunk_channels=8, block_seq="UD", k=5, scale=2)


def _model_check(seed: int, max_entries: Optional[int]) -> GradCheckResult:
    config = tiny_udvd_config()
    model = build_udvd(config, seed=seed)
    rng = np.random.default_rng(seed + 1)
    size = 8
    lr = rng.random((1, config.image_channels, size, size))
    dmap = rng.standard_normal((1, config.pca_dim + 1, size, size)) * 0.1
    hr = rng.random((1, config.image_channels, size * config.scale, size * config.scale))
    names = model.store.names()

    def fn(lr_t: Tensor, map_t: Tensor, hr_t: Tensor, *params: Tensor) -> Tensor:
        values = dict(zip(names, params))
        outputs = model.forward(lr_t, map_t, values)
        return multistage_loss(outputs.images, hr_t, config.multistage)

    inputs = [lr, dmap, hr] + [model.store[n].value.data for n in names]
    flags = [True, True, False] + [True] * len(names)
    return gradient_check(
        "udvd_tiny", fn, inputs, GRADCHECK_STEP, GRADCHECK_RTOL, GRADCHECK_MIN_PASS,
        max_entries=max_entries, seed=seed, differentiable=flags,
    )


def run_gradient_suite(
    seed: int = 0,
    max_entries: Optional[int] = 64,
    progress_callback: Optional[Callable[[GradCheckResult], None]] = None,
) -> List[GradCheckResult]:
    """
    Finite-difference check of every differentiable operation and of a tiny UDVD.

    Args:
        seed: Seed for inputs, model initialization and entry sub-sampling
        max_entries: Entries checked per input (``None`` checks all of them)
        progress_callback: Called with each finished result

    Returns:
        One result per check, in a fixed order
    """
    rng = np.random.default_rng(seed)

    def target(shape: tuple) -> Tensor:
        return Tensor(rng.standard_normal(shape), dtype=np.float64)

    t_conv, t_shuffle, t_concat = target((1, 3, 6, 6)), target((1, 2, 6, 6)), target((1, 5, 4, 4))
    t_dyn, t_dyn_pc, t_up = target((1, 3, 6, 6)), target((1, 2, 6, 6)), target((1, 3, 8, 8))

    normal = rng.standard_normal
    checks: List[Tuple[str, Callable[..., Tensor], List[np.ndarray]]] = [
        (
            "conv2d",
            lambda x, w, b: l2_loss(conv2d(x, w, b, pad=1), t_conv),
            [normal((1, 2, 6, 6)), normal((3, 2, 3, 3)), normal(3)],
        ),
        ("relu", lambda x: l2_loss(relu(x), t_shuffle), [_away_from_zero(rng, (1, 2, 6, 6))]),
        (
            "pixel_shuffle",
            lambda x: l2_loss(pixel_shuffle(x, 2), t_shuffle),
            [normal((1, 8, 3, 3))],
        ),
        (
            "concat_channels",
            lambda a, b: l2_loss(concat_channels([a, b]), t_concat),
            [normal((1, 2, 4, 4)), normal((1, 3, 4, 4))],
        ),
        ("l2_loss", l2_loss, [normal((1, 3, 4, 4)), normal((1, 3, 4, 4))]),
        (
            "dynamic_conv",
            lambda x, k: l2_loss(dynamic_conv(x, k), t_dyn),
            [normal((1, 3, 6, 6)), normal((1, 9, 6, 6))],
        ),
        (
            "dynamic_conv_per_channel",
            lambda x, k: l2_loss(dynamic_conv(x, k, channel_shared=False), t_dyn_pc),
            [normal((1, 2, 6, 6)), normal((1, 18, 6, 6))],
        ),
        (
            "dynamic_conv_upsample",
            lambda x, k: l2_loss(dynamic_conv_upsample(x, k, 2), t_up),
            [normal((1, 3, 4, 4)), normal((1, 36, 4, 4))],
        ),
    ]

    results = []
    for name, fn, inputs in checks:
        result = gradient_check(
            name, fn, inputs, GRADCHECK_STEP, GRADCHECK_RTOL, GRADCHECK_MIN_PASS,
            max_entries=max_entries, seed=seed,
        )
        logger.debug(
            "gradcheck %s: %d checked, max rel %.2e", name, result.checked, result.max_rel_error
        )
        results.append(result)
        if progress_callback:
            progress_callback(result)

    result = _model_check(seed, max_entries)
    results.append(result)
    if progress_callback:
        progress_callback(result)
    return results


# =========================================================================
# Benchmark
# =========================================================================


class BenchResult(BaseModel):
    """Timing of the reference loop against the vectorized operator."""
    op: str
    size: int
    k: int
    ref_ms: float
    opt_ms: float
    speedup: float


def _time_ms(fn: Callable[[], object], repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, (time.perf_counter() - start) * 1000.0)
    return best


def benchmark_dynconv(size: int = 256, k: int = 5, seed: int = 0, repeats: int = 3) -> BenchResult:
    """Best-of-``repeats`` time of the fast operator; the reference runs once."""
    rng = np.random.default_rng(seed)
    x = Tensor(rng.random((1, 3, size, size)))
    kernels = Tensor(rng.standard_normal((1, k * k, size, size)))
    ref_ms = _time_ms(lambda: dynamic_conv_reference(x, kernels), 1)
    opt_ms = _time_ms(lambda: dynamic_conv(x, kernels), repeats)
    speedup = ref_ms / opt_ms if opt_ms > 0 else float("inf")
    logger.info(
        "dynconv %dx%d k=%d: reference %.1f ms, fast %.1f ms", size, size, k, ref_ms, opt_ms
    )
    return BenchResult(op="dynconv", size=size, k=k, ref_ms=ref_ms, opt_ms=opt_ms, speedup=speedup)
