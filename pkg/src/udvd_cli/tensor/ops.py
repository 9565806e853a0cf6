"""Differentiable operations on NCHW tensors.

Every op is pure: it reads its inputs, returns a new Tensor and, when a
:class:`~udvd_cli.tensor.tensor.Graph` is active, records a backward closure.
Padding is always zero padding and stride is always 1.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ParameterError, ShapeError
from .tensor import Tensor, record


def _require_nchw(x: Tensor, op: str) -> Tuple[int, int, int, int]:
    if x.ndim != 4:
        raise ShapeError(f"{op}: expected a 4-D NCHW tensor, got shape {x.shape}")
    n, c, h, w = x.shape
    return n, c, h, w


def _result_dtype(*tensors: Optional[Tensor]) -> np.dtype:
    return np.result_type(*[t.dtype for t in tensors if t is not None])


def pad_hw(arr: np.ndarray, pad: int) -> np.ndarray:
    """Zero-pad the two trailing spatial axes."""
    if pad == 0:
        return arr
    return np.pad(arr, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


# =========================================================================
# Convolution
# =========================================================================


def conv2d_forward(
    x: np.ndarray, weight: np.ndarray, bias: Optional[np.ndarray], pad: int
) -> np.ndarray:
    """im2col-style convolution: a strided window view contracted with the weights."""
    kh, kw = weight.shape[2:]
    windows = sliding_window_view(pad_hw(x, pad), (kh, kw), axis=(2, 3))
    out = np.tensordot(windows, weight, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias[None, :, None, None]
    return np.ascontiguousarray(out)


def conv2d_backward(
    upstream: np.ndarray, x: np.ndarray, weight: np.ndarray, pad: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of conv2d w.r.t. input, weight and bias."""
    kh, kw = weight.shape[2:]
    windows = sliding_window_view(pad_hw(x, pad), (kh, kw), axis=(2, 3))
    grad_weight = np.tensordot(upstream, windows, axes=([0, 2, 3], [0, 2, 3]))
    grad_bias = upstream.sum(axis=(0, 2, 3))

    # full correlation of the upstream gradient with the flipped kernel
    padded = np.pad(upstream, ((0, 0), (0, 0), (kh - 1, kh - 1), (kw - 1, kw - 1)))
    up_windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))
    grad_padded = np.tensordot(up_windows, weight[:, :, ::-1, ::-1], axes=([1, 4, 5], [0, 2, 3]))
    grad_padded = grad_padded.transpose(0, 3, 1, 2)
    hp, wp = grad_padded.shape[2:]
    grad_x = grad_padded[:, :, pad : hp - pad, pad : wp - pad]
    return np.ascontiguousarray(grad_x), grad_weight, grad_bias


def conv2d(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, pad: int = 0) -> Tensor:
    """Standard 2-D convolution (cross-correlation), stride 1, zero padding."""
    n, c, h, w = _require_nchw(x, "conv2d")
    if weight.ndim != 4:
        raise ShapeError(f"conv2d: weight must be (c_out, c_in, kh, kw), got {weight.shape}")
    c_out, c_in, kh, kw = weight.shape
    if c != c_in:
        raise ShapeError(f"conv2d: input has {c} channels, weight expects {c_in}")
    if pad < 0:
        raise ParameterError(f"conv2d: pad must be >= 0, got {pad}")
    if bias is not None and bias.shape != (c_out,):
        raise ShapeError(f"conv2d: bias shape {bias.shape} != ({c_out},)")
    h_out, w_out = h + 2 * pad - kh + 1, w + 2 * pad - kw + 1
    if n == 0 or h_out < 1 or w_out < 1:
        raise ShapeError(f"conv2d: empty output ({n}, {c_out}, {h_out}, {w_out})")

    dtype = _result_dtype(x, weight, bias)
    xd = x.data.astype(dtype, copy=False)
    wd = weight.data.astype(dtype, copy=False)
    bd = None if bias is None else bias.data.astype(dtype, copy=False)
    out = Tensor.wrap(conv2d_forward(xd, wd, bd, pad).astype(dtype, copy=False))

    def backward(g: np.ndarray):
        gx, gw, gb = conv2d_backward(g, xd, wd, pad)
        return (gx, gw) if bias is None else (gx, gw, gb)

    inputs = (x, weight) if bias is None else (x, weight, bias)
    return record("conv2d", inputs, out, backward, pad=pad)


# =========================================================================
# Elementwise
# =========================================================================


def relu(x: Tensor) -> Tensor:
    """max(0, x); the subgradient at 0 is 0."""
    xd = x.data
    out = Tensor.wrap(np.maximum(xd, 0).astype(xd.dtype, copy=False))

    def backward(g: np.ndarray):
        return (g * (xd > 0),)

    return record("relu", (x,), out, backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} differ")
    out = Tensor.wrap(np.add(a.data, b.data))

    def backward(g: np.ndarray):
        return (g, g)

    return record("add", (a, b), out, backward)


def scale(x: Tensor, factor: float) -> Tensor:
    """Multiply by a constant."""
    out = Tensor.wrap((x.data * factor).astype(x.dtype, copy=False))

    def backward(g: np.ndarray):
        return ((g * factor).astype(x.dtype, copy=False),)

    return record("scale", (x,), out, backward, factor=factor)


# =========================================================================
# Layout
# =========================================================================


def _shuffle(arr: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = arr.shape
    out = arr.reshape(n, c // (r * r), r, r, h, w).transpose(0, 1, 4, 2, 5, 3)
    return np.ascontiguousarray(out.reshape(n, c // (r * r), h * r, w * r))


def _unshuffle(arr: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = arr.shape
    out = arr.reshape(n, c, h // r, r, w // r, r).transpose(0, 1, 3, 5, 2, 4)
    return np.ascontiguousarray(out.reshape(n, c * r * r, h // r, w // r))


def pixel_shuffle(x: Tensor, r: int) -> Tensor:
    """(n, c*r*r, h, w) -> (n, c, r*h, r*w); out[c, r*i+a, r*j+b] = x[c*r*r + a*r + b, i, j]."""
    n, c, h, w = _require_nchw(x, "pixel_shuffle")
    if r < 1:
        raise ParameterError(f"pixel_shuffle: rate must be >= 1, got {r}")
    if c % (r * r):
        raise ShapeError(f"pixel_shuffle: {c} channels not divisible by r^2 = {r * r}")
    out = Tensor.wrap(_shuffle(x.data, r))

    def backward(g: np.ndarray):
        return (_unshuffle(g, r),)

    return record("pixel_shuffle", (x,), out, backward, r=r)


def pixel_unshuffle(x: Tensor, r: int) -> Tensor:
    """Inverse of :func:`pixel_shuffle`."""
    n, c, h, w = _require_nchw(x, "pixel_unshuffle")
    if r < 1:
        raise ParameterError(f"pixel_unshuffle: rate must be >= 1, got {r}")
    if h % r or w % r:
        raise ShapeError(f"pixel_unshuffle: spatial dims {h}x{w} not divisible by {r}")
    out = Tensor.wrap(_unshuffle(x.data, r))

    def backward(g: np.ndarray):
        return (_shuffle(g, r),)

    return record("pixel_unshuffle", (x,), out, backward, r=r)


def concat_channels(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeError("concat_channels: nothing to concatenate")
    n, _, h, w = _require_nchw(parts[0], "concat_channels")
    for part in parts[1:]:
        pn, _, ph, pw = _require_nchw(part, "concat_channels")
        if (pn, ph, pw) != (n, h, w):
            raise ShapeError(
                f"concat_channels: part {part.shape} does not match {(n, h, w)} in n, h, w"
            )
    dtype = _result_dtype(*parts)
    out = Tensor.wrap(np.concatenate([p.data.astype(dtype, copy=False) for p in parts], axis=1))
    splits = np.cumsum([p.shape[1] for p in parts])[:-1]

    def backward(g: np.ndarray):
        return tuple(np.ascontiguousarray(piece) for piece in np.split(g, splits, axis=1))

    return record("concat_channels", tuple(parts), out, backward)


# =========================================================================
# Loss
# =========================================================================


def l2_loss(pred: Tensor, target: Tensor) -> Tensor:
    """Mean squared error; returns a 0-d tensor."""
    if pred.shape != target.shape:
        raise ShapeError(f"l2_loss: shapes {pred.shape} and {target.shape} differ")
    dtype = _result_dtype(pred, target)
    diff = pred.data.astype(dtype, copy=False) - target.data.astype(dtype, copy=False)
    count = diff.size
    out = Tensor.wrap(np.asarray(np.mean(diff * diff), dtype=dtype))

    def backward(g: np.ndarray):
        grad = (g * (2.0 / count) * diff).astype(dtype, copy=False)
        return (grad, -grad)

    return record("l2_loss", (pred, target), out, backward)
