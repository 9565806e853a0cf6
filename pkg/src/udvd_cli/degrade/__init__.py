"""Degradation synthesis and degradation-map encoding."""

from .dataset import ManifestEntry, load_manifest, synthesize_dataset
from .kernels import KERNEL_SIZE, BlurKernel, blur, gaussian_kernel
from .noise import add_awgn, counter_rng, stream_id
from .params import (
    MULTI_DEGRADATION_GRID,
    PRESETS,
    SPATIAL_NOISE_RANGE,
    SPATIAL_WIDTH_RANGE,
    DegradationParams,
)
from .pca import (
    PCA_DIM,
    PcaBasis,
    default_basis,
    default_width_grid,
    encode_degradation,
    encode_degradation_spatial,
    load_basis,
    pca_fit,
    save_basis,
)
from .pipeline import SpatialSchedule, degrade, degrade_spatial, spatial_schedule
from .resize import bicubic_resize, bicubic_upsample

__all__ = [
    "KERNEL_SIZE",
    "MULTI_DEGRADATION_GRID",
    "PCA_DIM",
    "PRESETS",
    "SPATIAL_NOISE_RANGE",
    "SPATIAL_WIDTH_RANGE",
    "BlurKernel",
    "DegradationParams",
    "ManifestEntry",
    "PcaBasis",
    "SpatialSchedule",
    "add_awgn",
    "bicubic_resize",
    "bicubic_upsample",
    "blur",
    "counter_rng",
    "default_basis",
    "default_width_grid",
    "degrade",
    "degrade_spatial",
    "encode_degradation",
    "encode_degradation_spatial",
    "gaussian_kernel",
    "load_basis",
    "load_manifest",
    "pca_fit",
    "save_basis",
    "spatial_schedule",
    "stream_id",
    "synthesize_dataset",
]
