"""PSNR and SSIM on the Y channel of YCbCr."""

from typing import Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError
from ..tensor import Tensor

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2

# studio-swing luma on the 0-255 scale for RGB in [0, 1]
Y_WEIGHTS = np.array([65.481, 128.553, 24.966])
Y_OFFSET = 16.0

ImageLike = Union[Tensor, np.ndarray]


def _as_chw(img: ImageLike) -> np.ndarray:
    arr = img.data if isinstance(img, Tensor) else np.asarray(img)
    if arr.ndim == 4:
        if arr.shape[0] != 1:
            raise ShapeError(f"metrics take one image at a time, got batch {arr.shape[0]}")
        arr = arr[0]
    if arr.ndim != 3 or arr.shape[0] != 3:
        raise ShapeError(f"expected an RGB image (3, H, W), got {arr.shape}")
    return arr.astype(np.float64)


def rgb_to_y(img: ImageLike) -> np.ndarray:
    """(H, W) luma in [16, 235] for RGB in [0, 1]."""
    return np.tensordot(Y_WEIGHTS, _as_chw(img), axes=1) + Y_OFFSET


def _pair(a: ImageLike, b: ImageLike) -> tuple:
    ya, yb = rgb_to_y(a), rgb_to_y(b)
    if ya.shape != yb.shape:
        raise ShapeError(f"image sizes differ: {ya.shape} vs {yb.shape}")
    return ya, yb


def psnr_y(a: ImageLike, b: ImageLike, border: int = 0) -> float:
    """PSNR in dB of the Y channels after cropping ``border`` pixels per side."""
    ya, yb = _pair(a, b)
    if border:
        if 2 * border >= min(ya.shape):
            raise ShapeError(f"border {border} leaves nothing of a {ya.shape} image")
        ya = ya[border:-border, border:-border]
        yb = yb[border:-border, border:-border]
    mse = float(np.mean((ya - yb) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(255.0**2 / mse))


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalized 2-D Gaussian window."""
    axis = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(axis**2) / (2.0 * sigma**2))
    g /= g.sum()
    return np.outer(g, g)


def _filter_valid(arr: np.ndarray, window: np.ndarray) -> np.ndarray:
    windows = sliding_window_view(arr, window.shape)
    return np.einsum("ijuv,uv->ij", windows, window)


def ssim_y(a: ImageLike, b: ImageLike) -> float:
    """Single-scale SSIM of the Y channels, averaged over valid window positions."""
    ya, yb = _pair(a, b)
    if min(ya.shape) < SSIM_WINDOW:
        raise ShapeError(f"image {ya.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    window = gaussian_window()
    mu_a = _filter_valid(ya, window)
    mu_b = _filter_valid(yb, window)
    var_a = _filter_valid(ya * ya, window) - mu_a * mu_a
    var_b = _filter_valid(yb * yb, window) - mu_b * mu_b
    cov = _filter_valid(ya * yb, window) - mu_a * mu_b
    numerator = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    denominator = (mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(numerator / denominator))
