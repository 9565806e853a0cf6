"""Degradation parameters and the standard evaluation settings."""

from typing import Dict, List, Tuple

from pydantic import BaseModel, Field, field_validator

WIDTH_RANGE = (0.2, 3.0)
NOISE_RANGE = (0.0, 75.0)
SCALES = (2, 3, 4)


class DegradationParams(BaseModel):
    """Ground-truth degradation handed to the non-blind network."""
    kernel_width: float = Field(ge=WIDTH_RANGE[0], le=WIDTH_RANGE[1])
    noise_level: float = Field(ge=NOISE_RANGE[0], le=NOISE_RANGE[1])
    scale: int

    model_config = {"frozen": True}

    @field_validator("scale")
    @classmethod
    def _check_scale(cls, v: int) -> int:
        if v not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}, got {v}")
        return v


# Fixed settings: BI is bicubic-only (near-delta blur, no noise), DN adds sigma 30.
PRESETS: Dict[str, Tuple[float, float]] = {
    "BI": (0.2, 0.0),
    "DN": (0.2, 30.0),
}

# The multiple-degradation grid: widths x noise levels.
MULTI_DEGRADATION_GRID: List[Tuple[float, float]] = [
    (width, noise) for noise in (15.0, 50.0) for width in (0.2, 1.3, 2.6)
]

# Spatially variant setting, increasing from the left edge to the right edge.
SPATIAL_WIDTH_RANGE = (0.2, 2.0)
SPATIAL_NOISE_RANGE = (5.0, 50.0)
