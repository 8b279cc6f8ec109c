"""IDX tensor files (the MNIST distribution format), plain or gzipped.

Header, big endian: two zero bytes, a dtype code, the number of dimensions,
then one unsigned 32 bit size per dimension. The payload follows row-major.
"""

from __future__ import annotations

import gzip
import struct
from typing import Sequence

import numpy as np

from .logistic import LogisticInstance

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

_DTYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}


class IdxFormatError(Exception):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")


def _read_bytes(path: str) -> bytes:
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as f:
        return f.read()


def read_idx(path: str, expected_magic: int | None = None) -> np.ndarray:
    """Parses one IDX file into an array of its declared shape and dtype."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise IdxFormatError(path, "file shorter than the magic number")
    (magic,) = struct.unpack(">I", raw[:4])
    if expected_magic is not None and magic != expected_magic:
        raise IdxFormatError(path, f"magic number {magic:#010x}, expected {expected_magic:#010x}")
    code, ndim = (magic >> 8) & 0xFF, magic & 0xFF
    if magic >> 16 != 0 or code not in _DTYPES or ndim == 0:
        raise IdxFormatError(path, f"bad magic number {magic:#010x}")

    header = 4 + 4 * ndim
    if len(raw) < header:
        raise IdxFormatError(path, "truncated header")
    shape = struct.unpack(f">{ndim}I", raw[4:header])
    dtype = _DTYPES[code]
    expected = int(np.prod(shape)) * dtype.itemsize
    if len(raw) - header < expected:
        raise IdxFormatError(path, f"truncated payload: {len(raw) - header} of {expected} bytes")
    return np.frombuffer(raw, dtype=dtype, count=int(np.prod(shape)), offset=header).reshape(shape)


def load_idx(
    image_path: str,
    label_path: str,
    digits: Sequence[int] = (0, 1),
) -> tuple[np.ndarray, np.ndarray]:
    """Images of two digit classes, flattened and scaled to [0, 1].

    Returns (features, labels) with labels -1 for digits[0] and +1 for digits[1].
    """
    if len(digits) != 2 or digits[0] == digits[1]:
        raise ValueError(f"need two distinct digit classes, got {digits}")
    images = read_idx(image_path, IMAGE_MAGIC)
    labels = read_idx(label_path, LABEL_MAGIC)
    if images.shape[0] != labels.shape[0]:
        raise IdxFormatError(image_path, f"{images.shape[0]} images but {labels.shape[0]} labels in {label_path}")

    keep = np.isin(labels, digits)
    pixels = int(np.prod(images.shape[1:]))
    features = images[keep].reshape(int(keep.sum()), pixels).astype(np.float64) / 255.0
    signs = np.where(labels[keep] == digits[1], 1.0, -1.0)
    return features, signs


def idx_instance(image_path: str, label_path: str, tau: float, digits: Sequence[int] = (0, 1)) -> LogisticInstance:
    """A logistic instance over two digit classes, without a reference solution."""
    features, labels = load_idx(image_path, label_path, digits)
    return LogisticInstance(features, labels, tau)
