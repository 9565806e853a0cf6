"""Shared fixtures for the udvd-cli test suite."""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from udvd_cli.images import write_png
from udvd_cli.model import UdvdConfig, build_udvd
from udvd_cli.tensor import Tensor


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="run long acceptance checks (oracle sweeps, toy training, benchmarks)",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def smooth_image(height: int, width: int, seed: int) -> Tensor:
    """Deterministic low-frequency RGB pattern in [0, 1]."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width] / max(height, width)
    channels = []
    for _ in range(3):
        fy, fx, phase = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0), rng.uniform(0, np.pi)
        channels.append(0.5 + 0.4 * np.sin(2 * np.pi * (fy * yy + fx * xx) + phase))
    return Tensor(np.stack(channels)[None])


@pytest.fixture(scope="session")
def make_image():
    return smooth_image


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config() -> UdvdConfig:
    """One residual block, 8 channels, one upsampling and one plain dynamic block."""
    return UdvdConfig(n_res_blocks=1, trunk_channels=8, block_seq="UD", k=5, scale=2)


@pytest.fixture
def tiny_model(tiny_config):
    return build_udvd(tiny_config, seed=0)


@pytest.fixture
def lr_image(rng) -> Tensor:
    return Tensor(rng.random((1, 3, 6, 6)))


@pytest.fixture
def hr_dir(tmp_path) -> Path:
    """Two smooth 32x32 PNGs."""
    directory = tmp_path / "hr"
    for i in range(2):
        write_png(directory / f"img{i}.png", smooth_image(32, 32, seed=i))
    return directory


@pytest.fixture
def hr_images() -> List[Tensor]:
    return [smooth_image(32, 32, seed=i) for i in range(2)]
