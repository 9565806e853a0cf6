"""Directory evaluation and degradation sweeps."""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from ..degrade import (
    MULTI_DEGRADATION_GRID,
    PRESETS,
    SPATIAL_NOISE_RANGE,
    SPATIAL_WIDTH_RANGE,
    DegradationParams,
    PcaBasis,
    degrade,
    degrade_spatial,
)
from ..degrade.noise import stream_id
from ..errors import ShapeError
from ..images import list_pngs, mod_crop, read_png
from ..model import Udvd
from ..tensor import Tensor
from .infer import bicubic_baseline, infer, infer_spatial
from .metrics import psnr_y, ssim_y

logger = logging.getLogger(__name__)


# =========================================================================
# Reports
# =========================================================================


class ImageScore(BaseModel):
    """Metrics of one prediction."""
    name: str
    psnr: float
    ssim: float


class EvalReport(BaseModel):
    """Per-image and mean PSNR/SSIM on Y."""
    images: List[ImageScore] = Field(default_factory=list)
    mean_psnr: float = 0.0
    mean_ssim: float = 0.0
    config: Dict[str, object] = Field(default_factory=dict)


class SweepSetting(BaseModel):
    """One degradation setting; ``spatial`` ramps width and noise across columns."""
    label: str
    kernel_width: Optional[float] = None
    noise_level: Optional[float] = None
    width_range: Optional[Tuple[float, float]] = None
    noise_range: Optional[Tuple[float, float]] = None

    @property
    def spatial(self) -> bool:
        return self.width_range is not None


class SweepRow(BaseModel):
    """Mean metrics of the model and of bicubic upsampling for one setting."""
    label: str
    model_psnr: float
    model_ssim: float
    bicubic_psnr: float
    bicubic_ssim: float


class SweepReport(BaseModel):
    scale: int
    border: int
    images: int
    rows: List[SweepRow] = Field(default_factory=list)


def _mean(values: Sequence[float]) -> float:
    return float(sum(values) / len(values)) if values else 0.0


def score_pair(name: str, pred: Tensor, gt: Tensor, border: int) -> ImageScore:
    return ImageScore(name=name, psnr=psnr_y(pred, gt, border), ssim=ssim_y(pred, gt))


def evaluate_dirs(
    pred_dir: Path,
    gt_dir: Path,
    scale: int,
    border: Optional[int] = None,
    progress_callback: Optional[Callable[[ImageScore], None]] = None,
) -> EvalReport:
    """
    Score every prediction against its ground truth.

    Files are paired in sorted-name order. Ground truths are mod-cropped to a
    multiple of ``scale``; the border crop defaults to ``scale``.
    """
    border = scale if border is None else border
    preds, gts = list_pngs(Path(pred_dir)), list_pngs(Path(gt_dir))
    if not preds:
        raise FileNotFoundError(f"no PNG images in {pred_dir}")
    if len(preds) != len(gts):
        raise ShapeError(f"{len(preds)} predictions but {len(gts)} ground-truth images")

    scores = []
    for pred_path, gt_path in zip(preds, gts):
        pred = read_png(pred_path)
        gt = mod_crop(read_png(gt_path), scale)
        if pred.shape != gt.shape:
            raise ShapeError(f"{pred_path.name}: {pred.shape[2:]} vs ground truth {gt.shape[2:]}")
        score = score_pair(pred_path.name, pred, gt, border)
        logger.debug("%s: %.3f dB, SSIM %.4f", score.name, score.psnr, score.ssim)
        if progress_callback:
            progress_callback(score)
        scores.append(score)

    return EvalReport(
        images=scores,
        mean_psnr=_mean([s.psnr for s in scores]),
        mean_ssim=_mean([s.ssim for s in scores]),
        config={"pred_dir": str(pred_dir), "gt_dir": str(gt_dir), "scale": scale, "border": border},
    )


# =========================================================================
# Sweeps
# =========================================================================


def default_settings() -> List[SweepSetting]:
    """Multiple-degradation grid, the BI/DN presets and the spatially variant ramp."""
    settings = [
        SweepSetting(label=f"eps={w:g},sigma={n:g}", kernel_width=w, noise_level=n)
        for w, n in MULTI_DEGRADATION_GRID
    ]
    settings += [
        SweepSetting(label=name, kernel_width=w, noise_level=n) for name, (w, n) in PRESETS.items()
    ]
    settings.append(
        SweepSetting(
            label="spatial", width_range=SPATIAL_WIDTH_RANGE, noise_range=SPATIAL_NOISE_RANGE
        )
    )
    return settings


def sweep(
    model: Udvd,
    basis: PcaBasis,
    hr_images: Sequence[Tensor],
    settings: Optional[Sequence[SweepSetting]] = None,
    border: Optional[int] = None,
    seed: int = 0,
) -> SweepReport:
    """Degrade each HR image per setting, then score the model and bicubic upsampling."""
    scale = model.config.scale
    border = scale if border is None else border
    settings = list(settings) if settings is not None else default_settings()
    report = SweepReport(scale=scale, border=border, images=len(hr_images))

    for setting in settings:
        model_scores, bicubic_scores = [], []
        for index, hr in enumerate(hr_images):
            hr = mod_crop(hr, scale)
            stream = stream_id(index)
            if setting.spatial:
                lr = degrade_spatial(
                    hr, setting.width_range, setting.noise_range, scale, seed, stream
                )
                sr = infer_spatial(model, lr, setting.width_range, setting.noise_range, basis)
            else:
                params = DegradationParams(
                    kernel_width=setting.kernel_width, noise_level=setting.noise_level, scale=scale
                )
                lr = degrade(hr, params, seed, stream)
                sr = infer(model, lr, params, basis)
            sr = Tensor(sr.data.clip(0.0, 1.0))
            model_scores.append(score_pair(setting.label, sr, hr, border))
            bicubic = Tensor(bicubic_baseline(lr, scale).data.clip(0.0, 1.0))
            bicubic_scores.append(score_pair(setting.label, bicubic, hr, border))
        report.rows.append(
            SweepRow(
                label=setting.label,
                model_psnr=_mean([s.psnr for s in model_scores]),
                model_ssim=_mean([s.ssim for s in model_scores]),
                bicubic_psnr=_mean([s.psnr for s in bicubic_scores]),
                bicubic_ssim=_mean([s.ssim for s in bicubic_scores]),
            )
        )
        row = report.rows[-1]
        logger.info(
            "sweep %s: model %.2f dB, bicubic %.2f dB", row.label, row.model_psnr, row.bicubic_psnr
        )
    return report
