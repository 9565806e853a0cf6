"""Convolution layers backed by named parameters."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional

import numpy as np

from ..errors import ConfigError
from ..tensor import Parameter, Tensor, conv2d


@dataclass(frozen=True)
class ConvSpec:
    """Shape of one convolution: ``name.weight`` is (c_out, c_in, size, size)."""
    name: str
    c_in: int
    c_out: int
    size: int = 3

    @property
    def parameter_count(self) -> int:
        return self.c_out * self.c_in * self.size * self.size + self.c_out


class Conv2d:
    """Same-padded 3x3 (or ``size`` x ``size``) convolution with bias."""

    def __init__(self, spec: ConvSpec, weight: Parameter, bias: Parameter):
        self.spec = spec
        self.weight = weight
        self.bias = bias

    def __call__(self, x: Tensor, values: Optional[Mapping[str, Tensor]] = None) -> Tensor:
        """Apply the layer; ``values`` substitutes parameter tensors by name."""
        weight, bias = self.weight.value, self.bias.value
        if values is not None:
            weight = values.get(self.weight.name, weight)
            bias = values.get(self.bias.name, bias)
        return conv2d(x, weight, bias, pad=self.spec.size // 2)

    def parameters(self) -> List[Parameter]:
        return [self.weight, self.bias]


class ParameterStore:
    """Ordered registry of parameters; names must be unique."""

    def __init__(self) -> None:
        self._params: Dict[str, Parameter] = {}

    def create_conv(
        self,
        spec: ConvSpec,
        rng: np.random.Generator,
        gain: float = 1.0,
        bias: Optional[np.ndarray] = None,
    ) -> Conv2d:
        """He-initialized weight scaled by ``gain``; bias zero unless given."""
        fan_in = spec.c_in * spec.size * spec.size
        std = np.sqrt(2.0 / fan_in) * gain
        weight = rng.standard_normal((spec.c_out, spec.c_in, spec.size, spec.size)) * std
        bias_values = np.zeros(spec.c_out) if bias is None else bias
        return Conv2d(
            spec,
            self.add(Parameter(f"{spec.name}.weight", Tensor(weight))),
            self.add(Parameter(f"{spec.name}.bias", Tensor(bias_values))),
        )

    def add(self, param: Parameter) -> Parameter:
        if param.name in self._params:
            raise ConfigError(f"duplicate parameter name {param.name!r}")
        self._params[param.name] = param
        return param

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params)
