"""Binary checkpoint format ("MCK1").

Layout (all integers little-endian):

    magic            4 bytes  b"MCK1"
    parameter count  u32
    per parameter:
        name length  u16
        name         utf-8 bytes
        rank         u8
        dims         rank x u32
        data         float64 raw, C order
    normalization    two records in the same layout, named
                     "norm.mean" and "norm.std" (NaN-filled when the
                     statistics have not been fitted yet)

Round-trips are bit-exact.  Momentum buffers are intentionally not
stored; loading always yields zero velocities.
"""

import os
import struct

import numpy as np

from ..errors import FormatError
from .config import NetworkConfig
from .model import Network, build_network

MAGIC = b"MCK1"
NORM_MEAN, NORM_STD = "norm.mean", "norm.std"


def _pack_record(name, array):
    data = np.ascontiguousarray(array, dtype=np.float64)
    encoded = name.encode("utf-8")
    head = struct.pack("<H", len(encoded)) + encoded
    head += struct.pack("<B", data.ndim)
    head += struct.pack(f"<{data.ndim}I", *data.shape)
    return head + data.tobytes()


class _Reader:
    def __init__(self, blob):
        self.blob = blob
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.blob):
            raise FormatError("checkpoint truncated")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def record(self):
        (name_len,) = struct.unpack("<H", self.take(2))
        name = self.take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<B", self.take(1))
        dims = struct.unpack(f"<{rank}I", self.take(4 * rank))
        count = int(np.prod(dims)) if rank else 1
        data = np.frombuffer(self.take(8 * count), dtype="<f8").reshape(dims)
        return name, np.ascontiguousarray(data)

    def done(self):
        return self.pos == len(self.blob)


def save_checkpoint(net, path):
    """Write `net` to `path` atomically (temp file + rename)."""
    chunks = [MAGIC, struct.pack("<I", len(net.params))]
    for name, param in net.params.items():
        chunks.append(_pack_record(name, param.value))
    channels = net.config.input_channels
    mean = net.norm_mean if net.norm_mean is not None else np.full(channels, np.nan)
    std = net.norm_std if net.norm_std is not None else np.full(channels, np.nan)
    chunks.append(_pack_record(NORM_MEAN, mean))
    chunks.append(_pack_record(NORM_STD, std))
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(b"".join(chunks))
        os.replace(tmp, path)
    except Exception:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def load_checkpoint(path):
    """Read a checkpoint; validates structure against the architecture."""
    with open(path, "rb") as fh:
        reader = _Reader(fh.read())
    if reader.take(4) != MAGIC:
        raise FormatError("bad checkpoint magic")
    (count,) = struct.unpack("<I", reader.take(4))
    values = {}
    for _ in range(count):
        name, data = reader.record()
        if name in values:
            raise FormatError(f"duplicate parameter {name!r}")
        values[name] = data
    stats = dict(reader.record() for _ in range(2))
    if not reader.done():
        raise FormatError("trailing bytes after checkpoint records")
    if set(stats) != {NORM_MEAN, NORM_STD}:
        raise FormatError("missing normalization records")

    try:
        channels = values["stage1.conv.weight"].shape[3]
    except (KeyError, IndexError):
        raise FormatError("checkpoint lacks a valid first-stage kernel") from None
    net = build_network(NetworkConfig(input_channels=int(channels)), seed=0)
    if set(values) != set(net.params):
        raise FormatError("parameter names do not match the architecture")
    for name, param in net.params.items():
        if values[name].shape != param.value.shape:
            raise FormatError(
                f"shape mismatch for {name}: file {values[name].shape}, "
                f"expected {param.value.shape}")
        param.value[...] = values[name]
        param.grad[...] = 0.0
        param.velocity[...] = 0.0
    mean, std = stats[NORM_MEAN], stats[NORM_STD]
    if np.all(np.isfinite(mean)) and np.all(np.isfinite(std)):
        net.norm_mean, net.norm_std = mean, std
    return net
