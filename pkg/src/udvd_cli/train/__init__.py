"""Training, inference, metrics and reports."""

from .augment import apply_augment, compose_augment, invert_augment
from .config import TrainConfig, learning_rate
from .data import Batch, BatchSynthesizer, PatchRegion, load_training_images, sample_patch
from .evaluate import (
    EvalReport,
    ImageScore,
    SweepReport,
    SweepRow,
    SweepSetting,
    default_settings,
    evaluate_dirs,
    sweep,
)
from .infer import bicubic_baseline, infer, infer_spatial, infer_with_map
from .metrics import psnr_y, rgb_to_y, ssim_y
from .trainer import Trainer, TrainingEvent, train
from .viz import KernelPanels, export_kernel_viz

__all__ = [
    "Batch",
    "BatchSynthesizer",
    "EvalReport",
    "ImageScore",
    "KernelPanels",
    "PatchRegion",
    "SweepReport",
    "SweepRow",
    "SweepSetting",
    "TrainConfig",
    "Trainer",
    "TrainingEvent",
    "apply_augment",
    "bicubic_baseline",
    "compose_augment",
    "default_settings",
    "evaluate_dirs",
    "export_kernel_viz",
    "infer",
    "infer_spatial",
    "infer_with_map",
    "invert_augment",
    "learning_rate",
    "load_training_images",
    "psnr_y",
    "rgb_to_y",
    "sample_patch",
    "ssim_y",
    "sweep",
    "train",
]
