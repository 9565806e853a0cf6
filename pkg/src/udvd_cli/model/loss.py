"""Multistage L2 loss over the intermediate images."""

from typing import Sequence

from ..degrade.resize import bicubic_resize
from ..errors import ShapeError
from ..tensor import Tensor, add, l2_loss


def stage_target(hr: Tensor, output: Tensor) -> Tensor:
    """HR resized (bicubic, antialiased) to the resolution of ``output``."""
    h, w = output.shape[2:]
    if hr.shape[2:] == (h, w):
        return hr
    return bicubic_resize(hr, h, w, antialias=True)


def multistage_loss(outputs: Sequence[Tensor], hr: Tensor, multistage: bool = True) -> Tensor:
    """Sum of per-stage L2 losses; only the final output when ``multistage`` is off."""
    if not outputs:
        raise ShapeError("multistage_loss needs at least one output")
    stages = list(outputs) if multistage else [outputs[-1]]
    total = None
    for output in stages:
        term = l2_loss(output, stage_target(hr, output))
        total = term if total is None else add(total, term)
    return total
