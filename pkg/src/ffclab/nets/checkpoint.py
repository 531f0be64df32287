"""Binary checkpoint format.

Layout, little-endian throughout: the 8-byte magic "CILCKPT1", then for each
named tensor a uint32 name length, the UTF-8 name bytes, a uint32 rank,
`rank` uint32 dimensions, and the raw float32 payload in row-major order.
Tensors are read until end of file.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import InputError

MAGIC = b"CILCKPT1"


def save_checkpoint(path, tensors: dict):
    """Write named arrays (numpy or torch) as float32."""
    chunks = [MAGIC]
    for name, value in tensors.items():
        arr = np.asarray(getattr(value, "detach", lambda: value)(),
                         dtype=np.float32)
        nb = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(nb)))
        chunks.append(nb)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    Path(path).write_bytes(b"".join(chunks))


def load_checkpoint(path) -> dict:
    """Read a checkpoint back as {name: float32 ndarray}."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise InputError(f"{path}: not a checkpoint file (bad magic)")
    out = {}
    off = 8
    total = len(raw)
    while off < total:
        if off + 4 > total:
            raise InputError(f"{path}: truncated checkpoint")
        (nlen,) = struct.unpack_from("<I", raw, off)
        off += 4
        name = raw[off:off + nlen].decode("utf-8")
        off += nlen
        (rank,) = struct.unpack_from("<I", raw, off)
        off += 4
        shape = struct.unpack_from(f"<{rank}I", raw, off)
        off += 4 * rank
        count = int(np.prod(shape)) if rank else 1
        end = off + 4 * count
        if end > total:
            raise InputError(f"{path}: truncated tensor payload for {name!r}")
        arr = np.frombuffer(raw, dtype="<f4", count=count, offset=off)
        out[name] = arr.reshape(shape).copy()
        off = end
    return out
