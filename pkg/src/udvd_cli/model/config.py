"""Architecture description of a UDVD network."""

from typing import List

from pydantic import BaseModel, Field, model_validator

from ..errors import ConfigError, config_errors


class UdvdConfig(BaseModel):
    """UDVD architecture.

    ``block_seq`` lists the dynamic blocks of the refinement network: ``U``
    blocks upsample, ``D`` blocks keep the resolution. An empty sequence is
    the baseline (trunk plus a sub-pixel output head).
    """
    n_res_blocks: int = Field(default=15, ge=0)
    trunk_channels: int = Field(default=128, ge=1)
    block_seq: str = Field(default="UDD", pattern=r"^[UD]*$")
    k: int = Field(default=5, ge=1)
    scale: int = Field(default=2, ge=1, le=4)
    multistage: bool = True
    image_channels: int = Field(default=3, ge=1)
    pca_dim: int = Field(default=15, ge=1)
    delta_kernel_init: bool = False

    @classmethod
    def checked(cls, **fields) -> "UdvdConfig":
        """Construct, raising ConfigError instead of pydantic's ValidationError."""
        with config_errors():
            return cls(**fields)

    @model_validator(mode="after")
    def _check_invariants(self) -> "UdvdConfig":
        self.block_rates()
        return self

    @property
    def is_baseline(self) -> bool:
        return not self.block_seq

    @property
    def input_channels(self) -> int:
        return self.image_channels + self.pca_dim + 1

    def block_rates(self) -> List[int]:
        """Upsample rate r of every dynamic block; U blocks split ``scale`` evenly."""
        if self.k % 2 == 0:
            raise ConfigError(f"per-pixel kernel size must be odd, got {self.k}")
        if self.is_baseline:
            return []
        ups = self.block_seq.count("U")
        if ups == 0:
            if self.scale != 1:
                raise ConfigError(
                    f"block sequence {self.block_seq!r} has no U block to reach x{self.scale}"
                )
            return [1] * len(self.block_seq)
        rate = round(self.scale ** (1.0 / ups))
        if rate < 2 or rate**ups != self.scale:
            raise ConfigError(
                f"scale {self.scale} cannot be split into {ups} equal integer upsampling steps"
            )
        return [rate if kind == "U" else 1 for kind in self.block_seq]

    def block_input_levels(self) -> List[int]:
        """Cumulative resolution factor (relative to LR) at each block's input."""
        levels, level = [], 1
        for rate in self.block_rates():
            levels.append(level)
            level *= rate
        return levels

    def align_levels(self) -> List[int]:
        """Resolution levels above LR at which the trunk features must be aligned."""
        return sorted({level for level in self.block_input_levels() if level > 1})

    def block_output_levels(self) -> List[int]:
        return [level * rate for level, rate in zip(self.block_input_levels(), self.block_rates())]

    @classmethod
    def standard(cls, scale: int) -> "UdvdConfig":
        """Full-size defaults: UDD for x2/x3, UUDD for x4."""
        return cls(block_seq="UUDD" if scale == 4 else "UDD", scale=scale)

    @classmethod
    def desk(cls, **overrides) -> "UdvdConfig":
        """Small configuration for commodity hardware."""
        params = {"n_res_blocks": 3, "trunk_channels": 32, "block_seq": "UDD", "scale": 2}
        params.update(overrides)
        return cls(**params)
