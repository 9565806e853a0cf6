"""Tests for Y-channel PSNR and SSIM."""

import numpy as np
import pytest

from udvd_cli.errors import ShapeError
from udvd_cli.tensor import Tensor
from udvd_cli.train import psnr_y, rgb_to_y, ssim_y
from udvd_cli.train.metrics import (
    PSNR_CAP,
    SSIM_C1,
    SSIM_C2,
    Y_OFFSET,
    Y_WEIGHTS,
    gaussian_window,
)


def gray(level_y, h=16, w=16):
    """RGB image whose luma is ``level_y`` everywhere."""
    return np.full((3, h, w), (level_y - Y_OFFSET) / Y_WEIGHTS.sum())


def ssim_loops(a, b):
    """Window-by-window SSIM of two luma planes."""
    window = gaussian_window()
    size = window.shape[0]
    h, w = a.shape
    values = []
    for i in range(h - size + 1):
        for j in range(w - size + 1):
            pa, pb = a[i : i + size, j : j + size], b[i : i + size, j : j + size]
            mu_a, mu_b = (window * pa).sum(), (window * pb).sum()
            var_a = (window * (pa - mu_a) ** 2).sum()
            var_b = (window * (pb - mu_b) ** 2).sum()
            cov = (window * (pa - mu_a) * (pb - mu_b)).sum()
            values.append(
                (2 * mu_a * mu_b + SSIM_C1)
                * (2 * cov + SSIM_C2)
                / ((mu_a**2 + mu_b**2 + SSIM_C1) * (var_a + var_b + SSIM_C2))
            )
    return float(np.mean(values))


# =============================================================================
# Luma
# =============================================================================


class TestRgbToY:
    def test_range(self):
        assert rgb_to_y(np.zeros((3, 2, 2)))[0, 0] == pytest.approx(16.0)
        assert rgb_to_y(np.ones((3, 2, 2)))[0, 0] == pytest.approx(235.0)

    def test_accepts_batched_tensor(self, rng):
        img = rng.random((3, 4, 5))
        np.testing.assert_allclose(rgb_to_y(Tensor(img[None])), rgb_to_y(img), rtol=1e-6)

    def test_rejects_batches(self, rng):
        with pytest.raises(ShapeError):
            rgb_to_y(rng.random((2, 3, 4, 4)))

    def test_rejects_gray(self, rng):
        with pytest.raises(ShapeError):
            rgb_to_y(rng.random((1, 4, 4)))


# =============================================================================
# PSNR
# =============================================================================


class TestPsnr:
    def test_one_level_offset(self):
        a = np.zeros((3, 8, 8))
        b = np.full((3, 8, 8), 1.0 / 219.0)
        assert psnr_y(a, b) == pytest.approx(10 * np.log10(65025.0), abs=1e-6)

    def test_sixteen_level_gap(self):
        assert psnr_y(gray(100.0), gray(116.0)) == pytest.approx(
            10 * np.log10(65025.0 / 256.0), abs=1e-6
        )

    def test_decreases_with_error(self):
        scores = [psnr_y(gray(100.0), gray(100.0 + gap)) for gap in (1.0, 2.0, 4.0, 8.0, 16.0)]
        assert all(a > b for a, b in zip(scores, scores[1:]))

    def test_identical_is_capped(self, rng):
        img = rng.random((3, 8, 8))
        assert psnr_y(img, img) == PSNR_CAP

    def test_border_crop_ignores_edges(self, rng):
        a = rng.random((3, 10, 10))
        b = a.copy()
        b[:, 0, :] = 0.0
        b[:, :, -2:] = 1.0
        assert psnr_y(a, b, border=2) == PSNR_CAP
        assert psnr_y(a, b) < 40.0

    def test_border_too_large(self, rng):
        img = rng.random((3, 8, 8))
        with pytest.raises(ShapeError):
            psnr_y(img, img, border=4)

    def test_size_mismatch(self, rng):
        with pytest.raises(ShapeError):
            psnr_y(rng.random((3, 8, 8)), rng.random((3, 8, 9)))


# =============================================================================
# SSIM
# =============================================================================


class TestSsim:
    def test_identical_is_one(self, rng):
        img = rng.random((3, 16, 16))
        assert ssim_y(img, img) == 1.0

    def test_constant_images(self):
        expected = (2 * 100 * 110 + SSIM_C1) / (100**2 + 110**2 + SSIM_C1)
        assert ssim_y(gray(100.0), gray(110.0)) == pytest.approx(expected, rel=1e-6)

    def test_matches_window_loops(self, rng):
        a = rng.random((3, 14, 13))
        b = np.clip(a + 0.1 * rng.standard_normal(a.shape), 0, 1)
        expected = ssim_loops(rgb_to_y(a), rgb_to_y(b))
        assert ssim_y(a, b) == pytest.approx(expected, rel=1e-9)

    def test_symmetric(self, rng):
        a, b = rng.random((3, 12, 12)), rng.random((3, 12, 12))
        assert ssim_y(a, b) == pytest.approx(ssim_y(b, a), rel=1e-12)

    def test_noise_lowers_ssim(self, make_image, rng):
        clean = make_image(24, 24, seed=0).data[0].astype(np.float64)
        noisy = clean + 0.2 * rng.standard_normal(clean.shape)
        assert ssim_y(clean, noisy) < 0.9

    def test_window(self):
        window = gaussian_window()
        assert window.shape == (11, 11)
        assert window.sum() == pytest.approx(1.0)
        assert window[5, 5] == window.max()

    def test_image_smaller_than_window(self, rng):
        img = rng.random((3, 10, 20))
        with pytest.raises(ShapeError):
            ssim_y(img, img)
