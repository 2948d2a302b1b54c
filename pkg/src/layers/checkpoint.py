"""
Checkpoint module for the layer stack.

A checkpoint is a versioned little-endian container:
    magic b"GLNN", version u32, then per entry until end of file:
    name length u32, UTF-8 name, rank u64, dims u64 * rank,
    float64 values in row-major order.
"""

import struct
from pathlib import Path

import numpy as np

from src.layers.tensor import ParamSet
from src.utils.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from src.utils.errors import CheckpointError


def encode_checkpoint(params: ParamSet) -> bytes:
    chunks = [CHECKPOINT_MAGIC, struct.pack("<I", CHECKPOINT_VERSION)]
    for name, values in params.items():
        encoded = name.encode("utf-8")
        values = np.ascontiguousarray(values, dtype="<f8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<Q{values.ndim}Q", values.ndim, *values.shape))
        chunks.append(values.tobytes())
    return b"".join(chunks)


def decode_checkpoint(data: bytes) -> ParamSet:
    """
    Parse a GLNN container.

    Args:
        data: Raw file contents

    Returns:
        dict: Parameter set in file order

    Raises:
        CheckpointError: On a wrong magic, unknown version or truncation
    """
    if data[:4] != CHECKPOINT_MAGIC:
        raise CheckpointError("not a GLNN checkpoint")
    if len(data) < 8:
        raise CheckpointError("checkpoint header is truncated")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")

    params: ParamSet = {}
    offset = 8
    try:
        while offset < len(data):
            (name_length,) = struct.unpack_from("<I", data, offset)
            offset += 4
            name = data[offset : offset + name_length].decode("utf-8")
            offset += name_length
            (rank,) = struct.unpack_from("<Q", data, offset)
            offset += 8
            shape = struct.unpack_from(f"<{rank}Q", data, offset)
            offset += 8 * rank
            size = int(np.prod(shape, dtype=np.int64)) * 8
            if offset + size > len(data):
                raise CheckpointError(f"entry {name!r} is truncated")
            values = np.frombuffer(data, dtype="<f8", count=size // 8, offset=offset)
            params[name] = values.reshape(shape).astype(np.float64)
            offset += size
    except (struct.error, UnicodeDecodeError) as e:
        raise CheckpointError(f"malformed checkpoint: {e}") from e
    return params


def save_checkpoint(path: str | Path, params: ParamSet):
    Path(path).write_bytes(encode_checkpoint(params))


def load_checkpoint(path: str | Path) -> ParamSet:
    return decode_checkpoint(Path(path).read_bytes())
