"""Tests for per-pixel dynamic convolution against the loop reference."""

import numpy as np
import pytest

from udvd_cli.dynconv import (
    PerPixelKernels,
    dynamic_conv,
    dynamic_conv_backward,
    dynamic_conv_reference,
    dynamic_conv_upsample,
    kernel_channel,
    tap_index,
)
from udvd_cli.errors import ParameterError, ShapeError
from udvd_cli.tensor import Graph, Tensor, gradient_check, l2_loss


def delta_kernels(n, k, h, w, r=1):
    kernels = np.zeros((n, k * k * r * r, h, w))
    centre = tap_index(k, 0, 0)
    kernels[:, centre :: k * k] = 1.0
    return kernels


def random_instance(rng, max_size):
    """Random (x, kernels, r, shared) covering both forms."""
    k = int(rng.choice([3, 5]))
    r = int(rng.integers(1, 5))
    shared = bool(r > 1 or rng.random() < 0.5)
    n, c = int(rng.integers(1, 3)), int(rng.integers(1, 4))
    h, w = rng.integers(1, max_size + 1, size=2)
    groups = r * r if shared else c
    x = rng.standard_normal((n, c, h, w))
    kernels = rng.standard_normal((n, groups * k * k, h, w))
    return Tensor(x, np.float64), Tensor(kernels, np.float64), r, shared


def optimized(x, kernels, r, shared):
    if r > 1:
        return dynamic_conv_upsample(x, kernels, r)
    return dynamic_conv(x, kernels, channel_shared=shared)


# =============================================================================
# Layout
# =============================================================================


class TestLayout:
    def test_tap_index(self):
        assert tap_index(5, 0, 0) == 12
        assert tap_index(5, -2, -2) == 0
        assert tap_index(3, 1, -1) == 6

    def test_tap_outside_window(self):
        with pytest.raises(ParameterError):
            tap_index(3, 2, 0)

    def test_upsampling_channel(self):
        assert kernel_channel(5, -2, -2, r=2, x=1, y=0) == 50
        assert kernel_channel(3, 0, 0, r=3, x=2, y=2) == 8 * 9 + 4

    def test_per_channel_channel(self):
        assert kernel_channel(3, 0, 0, c=2) == 2 * 9 + 4

    def test_infer_derives_k(self):
        layout = PerPixelKernels.infer(Tensor(np.zeros((1, 100, 2, 2))), 3, r=2)
        assert layout.k == 5
        assert layout.taps == 25

    def test_non_square_taps(self):
        with pytest.raises(ShapeError):
            PerPixelKernels.infer(Tensor(np.zeros((1, 10, 2, 2))), 3)

    def test_even_kernel(self):
        with pytest.raises(ParameterError):
            PerPixelKernels.infer(Tensor(np.zeros((1, 4, 2, 2))), 3)

    def test_expected_k_mismatch(self):
        with pytest.raises(ShapeError):
            PerPixelKernels.infer(Tensor(np.zeros((1, 9, 2, 2))), 3, k=5)

    def test_upsampling_is_always_shared(self):
        with pytest.raises(ParameterError):
            PerPixelKernels.infer(Tensor(np.zeros((1, 36, 2, 2))), 1, r=2, channel_shared=False)


# =============================================================================
# Typical form
# =============================================================================


class TestDynamicConv:
    def test_delta_kernels_are_identity(self, rng):
        x = Tensor(rng.standard_normal((2, 3, 5, 6)))
        out = dynamic_conv(x, Tensor(delta_kernels(2, 5, 5, 6)))
        assert np.array_equal(out.data, x.data)

    def test_uniform_kernels_are_box_filter(self, rng):
        x = rng.standard_normal((1, 1, 6, 6))
        kernels = np.full((1, 9, 6, 6), 1.0 / 9.0)
        out = dynamic_conv(Tensor(x, np.float64), Tensor(kernels, np.float64)).data
        padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
        expected = np.zeros_like(x)
        for i in range(6):
            for j in range(6):
                expected[0, 0, i, j] = padded[0, 0, i : i + 3, j : j + 3].sum() / 9.0
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_offset_direction(self):
        # K(u=1, v=0) = 1 reads x(i - 1, j)
        x = np.zeros((1, 1, 3, 3))
        x[0, 0, 0, 1] = 1.0
        kernels = np.zeros((1, 9, 3, 3))
        kernels[:, tap_index(3, 1, 0)] = 1.0
        out = dynamic_conv(Tensor(x), Tensor(kernels)).data
        assert out[0, 0, 1, 1] == 1.0
        assert out.sum() == 1.0

    def test_per_channel_kernels(self, rng):
        x = Tensor(rng.standard_normal((1, 2, 4, 4)), np.float64)
        kernels = Tensor(rng.standard_normal((1, 18, 4, 4)), np.float64)
        out = dynamic_conv(x, kernels, channel_shared=False)
        ref = dynamic_conv_reference(x, kernels, channel_shared=False)
        np.testing.assert_allclose(out.data, ref.data, atol=1e-10)

    def test_linear_in_input(self, rng):
        x, y = rng.standard_normal((2, 1, 2, 5, 5))
        kernels = Tensor(rng.standard_normal((1, 9, 5, 5)), np.float64)
        combined = dynamic_conv(Tensor(2.0 * x - 0.5 * y, np.float64), kernels).data
        separate = 2.0 * dynamic_conv(Tensor(x, np.float64), kernels).data - 0.5 * dynamic_conv(
            Tensor(y, np.float64), kernels
        ).data
        np.testing.assert_allclose(combined, separate, atol=1e-5)

    def test_linear_in_kernels(self, rng):
        x = Tensor(rng.standard_normal((1, 2, 6, 6)), np.float64)
        k1, k2 = rng.standard_normal((2, 1, 9, 6, 6))
        combined = dynamic_conv(x, Tensor(2.0 * k1 + 3.0 * k2, np.float64)).data
        separate = (
            2.0 * dynamic_conv(x, Tensor(k1, np.float64)).data
            + 3.0 * dynamic_conv(x, Tensor(k2, np.float64)).data
        )
        np.testing.assert_allclose(combined, separate, atol=1e-10)

    def test_channel_permutation(self, rng):
        x = rng.standard_normal((1, 3, 5, 5))
        kernels = Tensor(rng.standard_normal((1, 9, 5, 5)), np.float64)
        order = [2, 0, 1]
        permuted = dynamic_conv(Tensor(x[:, order], np.float64), kernels).data
        original = dynamic_conv(Tensor(x, np.float64), kernels).data
        np.testing.assert_allclose(permuted, original[:, order], atol=1e-12)

    def test_spatial_mismatch(self, rng):
        with pytest.raises(ShapeError):
            dynamic_conv(Tensor(rng.random((1, 3, 4, 4))), Tensor(rng.random((1, 9, 4, 5))))

    def test_batch_mismatch(self, rng):
        with pytest.raises(ShapeError):
            dynamic_conv(Tensor(rng.random((2, 3, 4, 4))), Tensor(rng.random((1, 9, 4, 4))))

    def test_gradients_k3(self, rng):
        target = Tensor(rng.standard_normal((1, 2, 5, 5)), np.float64)
        result = gradient_check(
            "dynamic_conv",
            lambda x, k: l2_loss(dynamic_conv(x, k), target),
            [rng.standard_normal((1, 2, 5, 5)), rng.standard_normal((1, 9, 5, 5))],
        )
        assert result.ok
        assert result.checked == 50 + 225

    def test_zero_upstream_gives_zero_gradients(self, rng):
        x = Tensor(rng.standard_normal((1, 2, 5, 5)), np.float64)
        kernels = Tensor(rng.standard_normal((1, 9, 5, 5)), np.float64)
        gx, gk = dynamic_conv_backward(Tensor(np.zeros((1, 2, 5, 5)), np.float64), x, kernels)
        assert not np.any(gx.data)
        assert not np.any(gk.data)

    def test_single_pixel_upstream_is_local(self, rng):
        x = Tensor(rng.standard_normal((1, 2, 7, 7)), np.float64)
        kernels = Tensor(rng.standard_normal((1, 9, 7, 7)), np.float64)
        upstream = np.zeros((1, 2, 7, 7))
        upstream[0, :, 3, 3] = 1.0
        gx, gk = dynamic_conv_backward(Tensor(upstream, np.float64), x, kernels)

        outside = np.ones((7, 7), dtype=bool)
        outside[3, 3] = False
        assert not np.any(gk.data[..., outside])
        assert np.any(gk.data[..., 3, 3])

        window = np.ones((7, 7), dtype=bool)
        window[2:5, 2:5] = False
        assert not np.any(gx.data[..., window])
        assert np.any(gx.data[..., 2:5, 2:5])

    def test_standalone_backward_matches_graph(self, rng):
        x = Tensor(rng.standard_normal((1, 2, 4, 4)), np.float64)
        kernels = Tensor(rng.standard_normal((1, 9, 4, 4)), np.float64)
        target = Tensor(np.zeros((1, 2, 4, 4)), np.float64)
        with Graph() as graph:
            out = dynamic_conv(x, kernels)
            loss = l2_loss(out, target)
        grads = graph.gradients(loss, [x, kernels])
        upstream = Tensor(2.0 / out.data.size * out.data, np.float64)
        gx, gk = dynamic_conv_backward(upstream, x, kernels)
        np.testing.assert_allclose(gx.data, grads[x.uid], atol=1e-12)
        np.testing.assert_allclose(gk.data, grads[kernels.uid], atol=1e-12)


# =============================================================================
# Upsampling form
# =============================================================================


class TestDynamicConvUpsample:
    @pytest.mark.parametrize("r", [2, 3, 4])
    def test_delta_kernels_replicate(self, rng, r):
        x = rng.standard_normal((1, 3, 4, 5))
        out = dynamic_conv_upsample(Tensor(x), Tensor(delta_kernels(1, 3, 4, 5, r)), r).data
        expected = np.repeat(np.repeat(x.astype(np.float32), r, axis=2), r, axis=3)
        assert out.shape == (1, 3, 4 * r, 5 * r)
        assert np.array_equal(out, expected)

    def test_rate_one_reproduces_typical_form(self, rng):
        x = Tensor(rng.standard_normal((1, 3, 6, 6)))
        kernels = Tensor(rng.standard_normal((1, 25, 6, 6)))
        typical = dynamic_conv(x, kernels).data
        assert np.array_equal(dynamic_conv_upsample(x, kernels, 1).data, typical)

    def test_sub_pixel_kernels_are_independent(self, rng):
        x = Tensor(rng.standard_normal((1, 1, 3, 3)))
        kernels = np.zeros((1, 4 * 9, 3, 3))
        # only sub-pixel (1, 0) sees the input
        kernels[:, kernel_channel(3, 0, 0, r=2, x=1, y=0)] = 1.0
        out = dynamic_conv_upsample(x, Tensor(kernels), 2).data
        assert np.array_equal(out[:, :, 1::2, 0::2], x.data)
        assert not np.any(out[:, :, 0::2, :])
        assert not np.any(out[:, :, :, 1::2])

    def test_wrong_channel_count(self, rng):
        with pytest.raises(ShapeError):
            x, kernels = Tensor(rng.random((1, 3, 4, 4))), Tensor(rng.random((1, 27, 4, 4)))
            dynamic_conv_upsample(x, kernels, 2)

    def test_gradients(self, rng):
        target = Tensor(rng.standard_normal((1, 2, 8, 8)), np.float64)
        result = gradient_check(
            "dynamic_conv_upsample",
            lambda x, k: l2_loss(dynamic_conv_upsample(x, k, 2), target),
            [rng.standard_normal((1, 2, 4, 4)), rng.standard_normal((1, 36, 4, 4))],
            max_entries=100,
        )
        assert result.ok


# =============================================================================
# Oracle equivalence
# =============================================================================


class TestReferenceEquivalence:
    def test_small_random_instances(self, rng):
        for _ in range(20):
            x, kernels, r, shared = random_instance(rng, max_size=6)
            out = optimized(x, kernels, r, shared)
            ref = dynamic_conv_reference(x, kernels, r=r, channel_shared=shared)
            assert out.shape == ref.shape
            assert np.max(np.abs(out.data - ref.data)) <= 1e-5

    @pytest.mark.slow
    def test_two_hundred_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            x, kernels, r, shared = random_instance(rng, max_size=32)
            out = optimized(x, kernels, r, shared)
            ref = dynamic_conv_reference(x, kernels, r=r, channel_shared=shared)
            assert np.max(np.abs(out.data - ref.data)) <= 1e-5

    def test_float32_agreement(self, rng):
        x = Tensor(rng.random((1, 3, 8, 8)))
        kernels = Tensor(rng.uniform(-0.2, 0.2, size=(1, 100, 8, 8)))
        out = dynamic_conv_upsample(x, kernels, 2)
        ref = dynamic_conv_reference(x, kernels, r=2)
        assert np.max(np.abs(out.data - ref.data)) <= 1e-5
