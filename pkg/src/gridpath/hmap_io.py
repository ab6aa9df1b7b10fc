"""HMAP binary exchange format: the sole planner <-> predictor contract.

Layout (little-endian regardless of host):

    offset  size  field
    0       4     magic "HMAP"
    4       4     version, uint32 = 1
    8       1     kind, uint8: 0 = CF, 1 = PP, 2 = ABS
    9       3     reserved, zero
    12      4     height, uint32
    16      4     width, uint32
    20      4*h*w values, float32, row-major

Values are floats on disk, so a write -> read -> write cycle is byte-exact.
Ground-truth PP maps carry {0} u [0.95, 1]; predictors emit continuous
values, which the default read mode clamps back into that shape (values
below the 0.95 knee become 0) while ``raw_pp`` accepts them verbatim.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO, Union

import numpy as np

from .errors import FormatError, RangeError
from .heuristics import HeuristicMap, HmapKind

MAGIC = b"HMAP"
VERSION = 1
RANGE_TOL = 1e-6
PP_KNEE = 0.95

_HEADER = struct.Struct("<4sIB3xII")


def write_hmap(hmap: HeuristicMap, sink: Union[BinaryIO, str], raw_pp: bool = False) -> int:
    """Serialize a heuristic map; returns the number of bytes written."""
    if isinstance(sink, str):
        with open(sink, "wb") as fh:
            return write_hmap(hmap, fh, raw_pp=raw_pp)
    values = np.ascontiguousarray(hmap.values, dtype="<f4")
    if not np.all(np.isfinite(values)):
        raise RangeError("refusing to write non-finite values")
    _check_range(hmap.kind, values, raw_pp=raw_pp, clamp=False)
    header = _HEADER.pack(MAGIC, VERSION, hmap.kind.value, hmap.height, hmap.width)
    sink.write(header)
    sink.write(values.tobytes())
    return len(header) + values.nbytes


def read_hmap(source: Union[BinaryIO, bytes, str], raw_pp: bool = False) -> HeuristicMap:
    hmap, _ = read_hmap_with_stats(source, raw_pp=raw_pp)
    return hmap


def read_hmap_with_stats(source: Union[BinaryIO, bytes, str],
                         raw_pp: bool = False) -> tuple[HeuristicMap, int]:
    """Parse an HMAP stream; returns (map, clamped-value count).

    The count is nonzero only for PP maps read without ``raw_pp``: values in
    (0, 0.95) are predictor noise below the ground-truth knee and get clamped
    to 0, which only deprioritizes the affected cells.
    """
    if isinstance(source, str):
        with open(source, "rb") as fh:
            return read_hmap_with_stats(fh, raw_pp=raw_pp)
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)

    header = source.read(_HEADER.size)
    if len(header) != _HEADER.size:
        raise FormatError(f"truncated header: {len(header)} bytes")
    magic, version, kind_code, height, width = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    try:
        kind = HmapKind(kind_code)
    except ValueError:
        raise FormatError(f"unknown kind code {kind_code}") from None
    if height < 1 or width < 1:
        raise FormatError(f"bad dimensions {height}x{width}")
    payload = source.read(4 * height * width)
    if len(payload) != 4 * height * width:
        raise FormatError(f"truncated payload: {len(payload)} of {4 * height * width} bytes")
    values = np.frombuffer(payload, dtype="<f4").reshape(height, width)
    if not np.all(np.isfinite(values)):
        raise RangeError("non-finite values in payload")
    values, clamped = _check_range(kind, values, raw_pp=raw_pp, clamp=True)
    return HeuristicMap(kind, values), clamped


def _check_range(kind: HmapKind, values: np.ndarray, raw_pp: bool, clamp: bool):
    """Validate the kind's value range (tolerance on the edges).  When
    ``clamp`` is set, apply the documented PP normalization and return the
    (possibly copied) payload plus the clamped-value count; the payload is
    otherwise untouched so round-trips stay bit-exact."""
    lo = float(values.min())
    hi = float(values.max())
    if kind is HmapKind.ABS:
        if lo < -RANGE_TOL:
            raise RangeError(f"ABS values must be >= 0, found {lo}")
    else:
        if lo < -RANGE_TOL or hi > 1.0 + RANGE_TOL:
            raise RangeError(f"{kind.name} values must lie in [0, 1], found [{lo}, {hi}]")
    if not clamp:
        return None
    clamped = 0
    if kind is HmapKind.PP and not raw_pp:
        below_knee = (values > 0.0) & (values < PP_KNEE - RANGE_TOL)
        clamped = int(below_knee.sum())
        if clamped:
            values = np.where(below_knee, np.float32(0.0), values).astype("<f4")
    return values, clamped
