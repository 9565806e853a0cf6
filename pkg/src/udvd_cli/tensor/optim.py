"""Adam optimizer with bias correction."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from ..errors import NonFiniteError, ParameterError, ShapeError
from .tensor import Parameter, Tensor

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Per-parameter moments plus the shared step counter."""
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def to_arrays(self) -> Dict[str, np.ndarray]:
        """Flatten into named arrays for the checkpoint container."""
        arrays: Dict[str, np.ndarray] = {"adam.step": np.asarray(self.step, dtype=np.float32)}
        for name, moment in self.m.items():
            arrays[f"adam.m.{name}"] = moment
            arrays[f"adam.v.{name}"] = self.v[name]
        return arrays

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray]) -> "AdamState":
        state = cls(step=int(arrays.get("adam.step", np.zeros(())).reshape(())))
        for key, value in arrays.items():
            if key.startswith("adam.m."):
                state.m[key[len("adam.m."):]] = np.array(value)
            elif key.startswith("adam.v."):
                state.v[key[len("adam.v."):]] = np.array(value)
        return state


def adam_step(
    params: Sequence[Parameter],
    grads: Sequence[np.ndarray],
    state: AdamState,
    lr: float,
) -> AdamState:
    """
    Apply one Adam update in place and advance the step counter.

    Args:
        params: Parameters to update (their ``value`` is replaced)
        grads: One gradient per parameter, same shapes
        state: Moments, mutated and returned
        lr: Learning rate, must be positive

    Returns:
        The updated state
    """
    if lr <= 0:
        raise ParameterError(f"learning rate must be > 0, got {lr}")
    if len(params) != len(grads):
        raise ShapeError(f"{len(params)} parameters but {len(grads)} gradients")

    bad: List[str] = []
    for p, g in zip(params, grads):
        if g.shape != p.shape:
            raise ShapeError(f"gradient for {p.name} has shape {g.shape}, expected {p.shape}")
        if not np.all(np.isfinite(g)):
            bad.append(p.name)
    if bad:
        raise NonFiniteError(f"non-finite gradient in {', '.join(bad)}; update rejected", bad)

    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step

    for p, g in zip(params, grads):
        dtype = p.value.dtype
        if p.name not in state.m:
            state.m[p.name] = np.zeros(p.shape, dtype=dtype)
            state.v[p.name] = np.zeros(p.shape, dtype=dtype)
        m = state.beta1 * state.m[p.name] + (1.0 - state.beta1) * g
        v = state.beta2 * state.v[p.name] + (1.0 - state.beta2) * (g * g)
        state.m[p.name] = m.astype(dtype, copy=False)
        state.v[p.name] = v.astype(dtype, copy=False)

        update = lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
        p.value = Tensor.wrap((p.value.data - update).astype(dtype, copy=False))

    return state


class Adam:
    """Thin stateful wrapper that reads gradients from the parameters."""

    def __init__(self, params: Sequence[Parameter], state: AdamState | None = None):
        self.params = list(params)
        self.state = state or AdamState()

    def step(self, lr: float) -> None:
        adam_step(self.params, [p.grad for p in self.params], self.state, lr)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
