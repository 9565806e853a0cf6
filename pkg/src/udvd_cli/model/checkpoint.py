"""Saving and loading trained networks.

A model is stored as ``<name>.ckpt`` (named parameter tensors) next to
``<name>.json`` (the UdvdConfig that built it).
"""

import json
import logging
from pathlib import Path
from typing import Dict, Mapping, Optional

import numpy as np

from ..errors import FormatError, config_errors
from ..tensor import load_checkpoint, save_checkpoint
from .config import UdvdConfig
from .network import Udvd, build_udvd

logger = logging.getLogger(__name__)


def config_path(checkpoint: Path) -> Path:
    return Path(checkpoint).with_suffix(".json")


def save_model(path: Path, model: Udvd, extra: Optional[Mapping[str, np.ndarray]] = None) -> None:
    """Write parameters (plus ``extra`` tensors such as optimizer state) and the config sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tensors: Dict[str, np.ndarray] = dict(model.named_arrays())
    if extra:
        tensors.update(extra)
    save_checkpoint(path, tensors)
    config_path(path).write_text(model.config.model_dump_json(indent=2))
    logger.info("saved model to %s", path)


def load_config(path: Path) -> UdvdConfig:
    sidecar = config_path(path)
    if not sidecar.exists():
        raise FormatError(f"{path}: missing config file {sidecar.name}")
    try:
        data = json.loads(sidecar.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{sidecar}: invalid JSON: {e}")
    with config_errors(str(sidecar)):
        return UdvdConfig.model_validate(data)


def load_model(path: Path) -> Udvd:
    """Rebuild the network from its sidecar config and restore the parameters."""
    config = load_config(path)
    tensors = load_checkpoint(path)
    model = build_udvd(config, seed=0)
    names = set(model.store.names())
    model.load_arrays({name: arr for name, arr in tensors.items() if name in names})
    return model


def load_extra(path: Path, prefix: str) -> Dict[str, np.ndarray]:
    """Non-parameter tensors of a checkpoint whose names start with ``prefix``."""
    return {name: arr for name, arr in load_checkpoint(path).items() if name.startswith(prefix)}
