"""Dense tensors, named parameters and the recorded operation graph."""

import itertools
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import GraphError, ShapeError

logger = logging.getLogger(__name__)

_uids = itertools.count()

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """Immutable dense array, NCHW for images, float32 unless asked otherwise.

    The backing array is marked read-only so no operation can mutate its
    inputs. Float64 tensors exist only for shadow evaluation in gradient checks.
    """

    __slots__ = ("_data", "uid")

    def __init__(self, data: Any, dtype: Any = np.float32):
        arr = np.array(data, dtype=dtype, copy=True)
        arr.setflags(write=False)
        self._data = arr
        self.uid = next(_uids)

    @classmethod
    def wrap(cls, arr: np.ndarray) -> "Tensor":
        """Adopt a freshly computed array without copying it."""
        tensor = cls.__new__(cls)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float32)
        arr.setflags(write=False)
        tensor._data = arr
        tensor.uid = next(_uids)
        return tensor

    @classmethod
    def zeros(cls, shape: Tuple[int, ...], dtype: Any = np.float32) -> "Tensor":
        return cls.wrap(np.zeros(shape, dtype=dtype))

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype

    @property
    def ndim(self) -> int:
        return self._data.ndim

    def numpy(self) -> np.ndarray:
        """Writable copy of the values."""
        return self._data.copy()

    def item(self) -> float:
        if self._data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self._data.reshape(()))

    def astype(self, dtype: Any) -> "Tensor":
        return Tensor(self._data, dtype=dtype)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype})"


class Parameter:
    """A trainable tensor with its gradient, addressed by a dotted name."""

    def __init__(self, name: str, value: Tensor):
        self.name = name
        self._value = value
        self.grad = np.zeros(value.shape, dtype=value.dtype)

    @property
    def value(self) -> Tensor:
        return self._value

    @value.setter
    def value(self, new: Tensor) -> None:
        if new.shape != self._value.shape:
            raise ShapeError(
                f"parameter {self.name}: shape {new.shape} != {self._value.shape}"
            )
        self._value = new

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._value.shape

    def zero_grad(self) -> None:
        self.grad = np.zeros(self.shape, dtype=self._value.dtype)

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


@dataclass
class OpRecord:
    """One executed operation captured during a forward pass."""
    kind: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward: BackwardFn
    attrs: Dict[str, Any] = field(default_factory=dict)


_state = threading.local()


def _stack() -> List["Graph"]:
    if not hasattr(_state, "graphs"):
        _state.graphs = []
    return _state.graphs


def active_graph() -> Optional["Graph"]:
    """The innermost graph recording on this thread, if any."""
    stack = _stack()
    return stack[-1] if stack else None


def record(
    kind: str,
    inputs: Sequence[Tensor],
    output: Tensor,
    backward: BackwardFn,
    **attrs: Any,
) -> Tensor:
    """Append an operation to the active graph. Ops call this unconditionally."""
    graph = active_graph()
    if graph is not None:
        graph.append(OpRecord(kind, tuple(inputs), output, backward, attrs))
    return output


class Graph:
    """Tape of executed operations, in execution (hence topological) order.

    Use as a context manager around a forward pass, then call
    :meth:`backward` with the scalar loss.
    """

    def __init__(self) -> None:
        self.records: List[OpRecord] = []
        self._produced: Dict[int, int] = {}

    def __enter__(self) -> "Graph":
        _stack().append(self)
        return self

    def __exit__(self, *exc: Any) -> None:
        stack = _stack()
        if stack and stack[-1] is self:
            stack.pop()

    def __len__(self) -> int:
        return len(self.records)

    def append(self, rec: OpRecord) -> None:
        if rec.output.uid in self._produced:
            raise GraphError(f"{rec.kind}: output tensor recorded twice")
        self._produced[rec.output.uid] = len(self.records)
        self.records.append(rec)

    def gradients(self, loss: Tensor, wrt: Iterable[Tensor] = ()) -> Dict[int, np.ndarray]:
        """Reverse-mode sweep from ``loss``; returns gradients keyed by tensor uid."""
        if loss.uid not in self._produced:
            raise GraphError("loss tensor was not recorded in this graph")
        if loss.data.size != 1:
            raise ShapeError(f"backward needs a scalar loss, got shape {loss.shape}")

        grads: Dict[int, np.ndarray] = {loss.uid: np.ones(loss.shape, dtype=loss.dtype)}
        last = self._produced[loss.uid]
        for rec in reversed(self.records[: last + 1]):
            upstream = grads.pop(rec.output.uid, None)
            if upstream is None:
                continue
            input_grads = rec.backward(upstream)
            for tensor, grad in zip(rec.inputs, input_grads):
                if grad is None:
                    continue
                if grad.shape != tensor.shape:
                    raise GraphError(
                        f"{rec.kind}: gradient shape {grad.shape} != input shape {tensor.shape}"
                    )
                if tensor.uid in grads:
                    grads[tensor.uid] = grads[tensor.uid] + grad
                else:
                    grads[tensor.uid] = grad

        wanted = {t.uid for t in wrt}
        if wanted:
            return {uid: g for uid, g in grads.items() if uid in wanted}
        return grads

    def backward(self, loss: Tensor, parameters: Iterable[Parameter] = ()) -> None:
        """Write d(loss)/d(parameter) into every parameter's ``grad``."""
        params = list(parameters)
        grads = self.gradients(loss, [p.value for p in params])
        for p in params:
            grad = grads.get(p.value.uid)
            if grad is None:
                p.zero_grad()
            else:
                p.grad = np.asarray(grad, dtype=p.value.dtype)
        logger.debug("backward over %d records, %d parameters", len(self.records), len(params))


def backward(graph: Graph, loss: Tensor, parameters: Iterable[Parameter] = ()) -> None:
    graph.backward(loss, parameters)
