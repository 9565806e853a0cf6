"""UDVD network: feature trunk, feature alignment and the dynamic refinement blocks."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional

import numpy as np

from ..errors import ShapeError
from ..dynconv import dynamic_conv, dynamic_conv_upsample
from ..tensor import Parameter, Tensor, add, concat_channels, pixel_shuffle, relu
from .config import UdvdConfig
from .layers import Conv2d, ConvSpec, ParameterStore

logger = logging.getLogger(__name__)

HEAD_CHANNELS = (16, 16, 32)
RESIDUAL_CHANNELS = 16
DELTA_KERNEL_GAIN = 0.1
BLOCK_PARTS = ("head1", "head2", "head3", "kernel", "res1", "res2")

Values = Optional[Mapping[str, Tensor]]


# =========================================================================
# Layer layout
# =========================================================================


def _block_prefix(index: int) -> str:
    return f"refine.block{index}"


def layer_specs(config: UdvdConfig) -> List[ConvSpec]:
    """Every convolution of the network in creation order."""
    trunk = config.trunk_channels
    specs = [ConvSpec("feat.head", config.input_channels, trunk)]
    for b in range(config.n_res_blocks):
        specs.append(ConvSpec(f"feat.res{b}.conv1", trunk, trunk))
        specs.append(ConvSpec(f"feat.res{b}.conv2", trunk, trunk))

    if config.is_baseline:
        specs.append(ConvSpec("out.conv", trunk, config.image_channels * config.scale**2))
        return specs

    for level in config.align_levels():
        specs.append(ConvSpec(f"refine.align.x{level}", trunk, trunk * level * level))

    c_img, k = config.image_channels, config.k
    head1, head2, head3 = HEAD_CHANNELS
    for m, r in enumerate(config.block_rates()):
        p = _block_prefix(m)
        specs += [
            ConvSpec(f"{p}.head1", c_img, head1),
            ConvSpec(f"{p}.head2", head1, head2),
            ConvSpec(f"{p}.head3", head2, head3),
            ConvSpec(f"{p}.kernel", head3 + trunk, k * k * r * r),
            ConvSpec(f"{p}.res1", head3 + trunk, RESIDUAL_CHANNELS),
            ConvSpec(f"{p}.res2", RESIDUAL_CHANNELS, c_img * r * r),
        ]
    return specs


def parameter_count(config: UdvdConfig) -> int:
    """Number of trainable scalars, without allocating the network."""
    return sum(spec.parameter_count for spec in layer_specs(config))


# =========================================================================
# Dynamic block
# =========================================================================


@dataclass
class DynamicBlock:
    """Layers of one dynamic block with its upsample rate."""
    index: int
    rate: int
    head1: Conv2d
    head2: Conv2d
    head3: Conv2d
    kernel: Conv2d
    res1: Conv2d
    res2: Conv2d


@dataclass
class DynamicBlockOutput:
    """I_m = O_m + R_m together with the predicted kernels."""
    image: Tensor
    dynamic: Tensor
    residual: Tensor
    kernels: Tensor


def dynamic_block_forward(
    previous: Tensor, features: Tensor, block: DynamicBlock, values: Values = None
) -> DynamicBlockOutput:
    """
    One refinement step.

    Args:
        previous: I_{m-1}, (n, c, h, w)
        features: Trunk features aligned to the resolution of ``previous``
        block: Layers of this block
        values: Optional substitute parameter tensors by name

    Returns:
        DynamicBlockOutput at resolution (h * r, w * r)
    """
    if previous.ndim != 4 or features.ndim != 4:
        raise ShapeError(f"expected NCHW tensors, got {previous.shape} and {features.shape}")
    if previous.shape[0] != features.shape[0] or previous.shape[2:] != features.shape[2:]:
        raise ShapeError(
            f"block {block.index}: features {features.shape} "
            f"are not aligned with image {previous.shape}"
        )

    h = relu(block.head1(previous, values))
    h = relu(block.head2(h, values))
    h = block.head3(h, values)
    joined = concat_channels([h, features])

    kernels = block.kernel(joined, values)
    residual = block.res2(relu(block.res1(joined, values)), values)
    if block.rate > 1:
        residual = pixel_shuffle(residual, block.rate)
        dynamic = dynamic_conv_upsample(previous, kernels, block.rate)
    else:
        dynamic = dynamic_conv(previous, kernels)
    return DynamicBlockOutput(add(dynamic, residual), dynamic, residual, kernels)


# =========================================================================
# Network
# =========================================================================


@dataclass
class UdvdOutput:
    """Intermediate images I_1..I_M (the last one is the SR output)."""
    images: List[Tensor]
    blocks: List[DynamicBlockOutput]

    @property
    def final(self) -> Tensor:
        return self.images[-1]


class Udvd:
    """A built network: configuration plus its named parameters."""

    def __init__(self, config: UdvdConfig, store: ParameterStore, layers: Dict[str, Conv2d]):
        self.config = config
        self.store = store
        self.layers = layers
        self.blocks = [
            DynamicBlock(
                index=m,
                rate=r,
                **{part: layers[f"{_block_prefix(m)}.{part}"] for part in BLOCK_PARTS},
            )
            for m, r in enumerate(config.block_rates())
        ]

    def parameters(self) -> List[Parameter]:
        return list(self.store)

    def named_arrays(self) -> Dict[str, np.ndarray]:
        return {p.name: p.value.data for p in self.store}

    def load_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        """Replace parameter values; names and shapes must match exactly."""
        missing = set(self.store.names()) - set(arrays)
        extra = set(arrays) - set(self.store.names())
        if missing or extra:
            raise ShapeError(
                f"parameter names differ: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        for param in self.store:
            param.value = Tensor(arrays[param.name], dtype=param.value.dtype)

    def zero_grad(self) -> None:
        for param in self.store:
            param.zero_grad()

    def _map_batch(self, dmap: Tensor, n: int, h: int, w: int) -> Tensor:
        channels = self.config.pca_dim + 1
        if dmap.ndim == 3:
            dmap = Tensor.wrap(dmap.data[None])
        if dmap.ndim != 4 or dmap.shape[1:] != (channels, h, w):
            raise ShapeError(f"degradation map {dmap.shape} does not fit ({channels}, {h}, {w})")
        if dmap.shape[0] == n:
            return dmap
        if dmap.shape[0] == 1:
            return Tensor.wrap(np.repeat(dmap.data, n, axis=0))
        raise ShapeError(f"degradation map batch {dmap.shape[0]} does not match image batch {n}")

    def features(self, lr: Tensor, dmap: Tensor, values: Values = None) -> Tensor:
        """Trunk features from the LR image concatenated with its degradation map."""
        if lr.ndim != 4 or lr.shape[1] != self.config.image_channels:
            raise ShapeError(
                f"expected (n, {self.config.image_channels}, h, w) LR input, got {lr.shape}"
            )
        n, _, h, w = lr.shape
        x = concat_channels([lr, self._map_batch(dmap, n, h, w)])
        feat = self.layers["feat.head"](x, values)
        for b in range(self.config.n_res_blocks):
            y = self.layers[f"feat.res{b}.conv1"](feat, values)
            y = self.layers[f"feat.res{b}.conv2"](relu(y), values)
            feat = add(feat, y)
        return feat

    def forward(self, lr: Tensor, dmap: Tensor, values: Values = None) -> UdvdOutput:
        feat = self.features(lr, dmap, values)
        if self.config.is_baseline:
            out = pixel_shuffle(self.layers["out.conv"](feat, values), self.config.scale)
            return UdvdOutput([out], [])

        aligned = {1: feat}
        image, level = lr, 1
        outputs = []
        for block in self.blocks:
            if level not in aligned:
                conv = self.layers[f"refine.align.x{level}"]
                aligned[level] = pixel_shuffle(conv(feat, values), level)
            result = dynamic_block_forward(image, aligned[level], block, values)
            outputs.append(result)
            image = result.image
            level *= block.rate
        return UdvdOutput([o.image for o in outputs], outputs)

    __call__ = forward


def build_udvd(config: UdvdConfig, seed: int = 0) -> Udvd:
    """Allocate and initialize a network; identical seeds give identical parameters."""
    rng = np.random.default_rng(seed)
    store = ParameterStore()
    layers: Dict[str, Conv2d] = {}
    k2 = config.k * config.k
    for spec in layer_specs(config):
        gain, bias = 1.0, None
        if config.delta_kernel_init and spec.name.endswith(".kernel"):
            # each r*r sub-kernel starts as a centred delta
            gain = DELTA_KERNEL_GAIN
            bias = np.zeros(spec.c_out)
            bias[k2 // 2 :: k2] = 1.0
        layers[spec.name] = store.create_conv(spec, rng, gain=gain, bias=bias)
    logger.debug(
        "built UDVD %s with %d parameters", config.block_seq or "baseline", parameter_count(config)
    )
    return Udvd(config, store, layers)


def udvd_forward(lr: Tensor, dmap: Tensor, model: Udvd) -> List[Tensor]:
    """I_1..I_M for an LR batch and its degradation map."""
    return model.forward(lr, dmap).images
