"""Training configuration and the learning-rate schedule."""

from typing import Tuple

from pydantic import BaseModel, Field, model_validator

from ..degrade.params import NOISE_RANGE, SCALES, WIDTH_RANGE
from ..errors import ConfigError, config_errors
from ..model import UdvdConfig


class TrainConfig(BaseModel):
    """Everything a training run depends on; the seed makes it reproducible."""
    model: UdvdConfig = Field(default_factory=UdvdConfig)
    batch: int = Field(default=32, ge=1)
    lr0: float = Field(default=1e-4, gt=0)
    halve_every: int = Field(default=200_000, ge=1)
    total_steps: int = Field(default=1000, ge=1)
    patch_lr: int = Field(default=48, ge=1)
    eps_range: Tuple[float, float] = WIDTH_RANGE
    sigma_range: Tuple[float, float] = NOISE_RANGE
    seed: int = Field(default=0, ge=0)
    fixed_patches: int = Field(default=0, ge=0)
    checkpoint_every: int = Field(default=0, ge=0)
    log_every: int = Field(default=100, ge=1)
    workers: int = Field(default=1, ge=1)

    @classmethod
    def checked(cls, **fields) -> "TrainConfig":
        with config_errors():
            return cls(**fields)

    @model_validator(mode="after")
    def _check_ranges(self) -> "TrainConfig":
        for label, (lo, hi), legal in (
            ("eps_range", self.eps_range, WIDTH_RANGE),
            ("sigma_range", self.sigma_range, NOISE_RANGE),
        ):
            if not legal[0] <= lo <= hi <= legal[1]:
                raise ConfigError(f"{label} ({lo}, {hi}) must lie within {legal} with lo <= hi")
        if self.model.scale not in SCALES:
            raise ConfigError(f"training scale must be one of {SCALES}, got {self.model.scale}")
        return self

    @property
    def scale(self) -> int:
        return self.model.scale

    @property
    def patch_hr(self) -> int:
        return self.patch_lr * self.model.scale

    @classmethod
    def desk(cls, **overrides) -> "TrainConfig":
        """Commodity-hardware run: desk model, batch 4."""
        params = {"model": UdvdConfig.desk(), "batch": 4}
        params.update(overrides)
        return cls(**params)


def learning_rate(lr0: float, halve_every: int, step: int) -> float:
    """lr0 halved every ``halve_every`` steps; steps count from 1."""
    return lr0 * 0.5 ** ((max(step, 1) - 1) // halve_every)
