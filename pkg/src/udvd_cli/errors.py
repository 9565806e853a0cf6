"""Exception hierarchy for udvd-cli."""

from contextlib import contextmanager
from typing import Iterator, List, Optional

from pydantic import ValidationError


class UdvdError(Exception):
    """Base error for everything raised by udvd-cli."""
    pass


class ShapeError(UdvdError, ValueError):
    """Tensor shapes do not fit the operation."""
    pass


class ParameterError(UdvdError, ValueError):
    """A scalar parameter is outside its legal range."""
    pass


class ConfigError(UdvdError, ValueError):
    """A model or training configuration violates its invariants."""
    pass


class RankError(UdvdError, ValueError):
    """A decomposition has too little rank to be useful."""
    pass


class GraphError(UdvdError):
    """The recorded operation graph cannot be traversed."""
    pass


class NonFiniteError(UdvdError):
    """A NaN or Inf showed up where only finite values are allowed."""

    def __init__(self, message: str, names: Optional[List[str]] = None):
        super().__init__(message)
        self.names = names or []


class FormatError(UdvdError):
    """A .ten or checkpoint file is malformed."""
    pass


class ImageTooSmallError(UdvdError):
    """An image is smaller than the requested patch."""

    def __init__(self, message: str, shape: Optional[tuple] = None):
        super().__init__(message)
        self.shape = shape


def validation_message(e: ValidationError) -> str:
    """One line per failed field; invariant errors keep their own message."""
    parts = []
    for item in e.errors():
        cause = item.get("ctx", {}).get("error")
        msg = str(cause) if isinstance(cause, Exception) else item.get("msg")
        where = ".".join(str(p) for p in item.get("loc", ()))
        parts.append(f"{where}: {msg}" if where else str(msg))
    return "; ".join(parts)


@contextmanager
def config_errors(source: Optional[str] = None) -> Iterator[None]:
    """Re-raise pydantic validation failures as :class:`ConfigError`."""
    try:
        yield
    except ValidationError as e:
        message = validation_message(e)
        raise ConfigError(f"{source}: {message}" if source else message) from e


class TrainingDivergedError(UdvdError):
    """Training produced a non-finite loss."""

    def __init__(self, message: str, step: int, batch_seeds: List[int]):
        super().__init__(message)
        self.step = step
        self.batch_seeds = batch_seeds
