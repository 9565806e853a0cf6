"""The ``.ten`` tensor container and the named-tensor checkpoint container.

``.ten``: magic ``UDVDTEN1``, u32 LE rank, rank u32 LE dims, raw f32 LE values.
Checkpoint: u32 LE count, then per entry u16 LE name length, UTF-8 name and an
embedded ``.ten`` payload.
"""

import struct
from pathlib import Path
from typing import Dict, Mapping, Tuple

import numpy as np

from ..errors import FormatError
from .tensor import Tensor

MAGIC = b"UDVDTEN1"


def _as_array(value: object) -> np.ndarray:
    data = value.data if isinstance(value, Tensor) else value
    return np.asarray(data, dtype="<f4")


def encode_tensor(value: object) -> bytes:
    arr = _as_array(value)
    header = MAGIC + struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape)
    return header + np.ascontiguousarray(arr).tobytes()


def decode_tensor(buf: bytes, offset: int = 0) -> Tuple[np.ndarray, int]:
    """Decode one ``.ten`` payload starting at ``offset``; returns (array, next offset)."""
    if buf[offset : offset + len(MAGIC)] != MAGIC:
        raise FormatError("bad magic, not a .ten payload")
    offset += len(MAGIC)
    try:
        (rank,) = struct.unpack_from("<I", buf, offset)
        offset += 4
        dims = struct.unpack_from(f"<{rank}I", buf, offset)
        offset += 4 * rank
    except struct.error as e:
        raise FormatError(f"truncated .ten header: {e}")
    count = int(np.prod(dims, dtype=np.int64))
    end = offset + 4 * count
    if end > len(buf):
        raise FormatError(f"truncated .ten data: need {end} bytes, have {len(buf)}")
    arr = np.frombuffer(buf, dtype="<f4", count=count, offset=offset).reshape(dims)
    return arr.astype(np.float32), end


def save_tensor(path: Path, value: object) -> None:
    Path(path).write_bytes(encode_tensor(value))


def load_tensor(path: Path) -> np.ndarray:
    buf = Path(path).read_bytes()
    arr, end = decode_tensor(buf)
    if end != len(buf):
        raise FormatError(f"{path}: {len(buf) - end} trailing bytes after tensor")
    return arr


def save_checkpoint(path: Path, tensors: Mapping[str, object]) -> None:
    """Write named tensors in insertion order."""
    chunks = [struct.pack("<I", len(tensors))]
    for name, value in tensors.items():
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise FormatError(f"tensor name too long: {name[:40]}...")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(encode_tensor(value))
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path: Path) -> Dict[str, np.ndarray]:
    buf = Path(path).read_bytes()
    try:
        (count,) = struct.unpack_from("<I", buf, 0)
    except struct.error:
        raise FormatError(f"{path}: empty checkpoint")
    offset = 4
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        try:
            (length,) = struct.unpack_from("<H", buf, offset)
        except struct.error:
            raise FormatError(f"{path}: truncated entry header")
        offset += 2
        try:
            name = buf[offset : offset + length].decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"{path}: tensor name is not valid UTF-8")
        offset += length
        tensors[name], offset = decode_tensor(buf, offset)
    if offset != len(buf):
        raise FormatError(f"{path}: {len(buf) - offset} trailing bytes")
    return tensors
