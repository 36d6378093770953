"""Snapshot files and CSV tables.

Snapshot file layout (little-endian)::

    b"KBF1" | u32 M | u64 T | T*M complex samples as float64 (re, im) pairs

Samples are stored snapshot after snapshot, channels contiguous within each
snapshot.
"""

import csv
import struct

import numpy as np

from .errors import SnapshotFormatError

MAGIC = b"KBF1"
_HEADER = struct.Struct("<4sIQ")
HEADER_SIZE = _HEADER.size  # 16


def write_snapshots(path, Y):
    Y = np.asarray(Y, dtype=np.complex128)
    if Y.ndim != 2 or Y.shape[0] < 1 or Y.shape[1] < 1:
        raise ValueError(f"snapshots must be a non-empty (T, M) array, got {Y.shape}")
    T, M = Y.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, M, T))
        fh.write(np.ascontiguousarray(Y).astype("<c16", copy=False).tobytes())


def read_snapshots(path):
    """Return the (T, M) complex snapshot array stored at ``path``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise SnapshotFormatError(
            f"file is {len(raw)} bytes, shorter than the {HEADER_SIZE}-byte header", len(raw))
    magic, M, T = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if M < 1:
        raise SnapshotFormatError("channel count M must be >= 1", 4)
    if T < 1:
        raise SnapshotFormatError("snapshot count T must be >= 1", 8)
    expected = HEADER_SIZE + 16 * M * T
    if len(raw) < expected:
        raise SnapshotFormatError(
            f"truncated payload: header promises {T} snapshots of {M} channels "
            f"({expected} bytes) but file ends early", len(raw))
    if len(raw) > expected:
        raise SnapshotFormatError(
            f"{len(raw) - expected} trailing bytes after the payload", expected)
    data = np.frombuffer(raw, dtype="<c16", count=M * T, offset=HEADER_SIZE)
    return data.reshape(T, M).astype(np.complex128)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_columns(path, columns):
    """Write a dict of equal-length 1-D columns."""
    header = list(columns)
    cols = [np.asarray(columns[h]) for h in header]
    write_csv(path, header, zip(*cols))


def read_csv(path):
    """Read a CSV written by this package into a dict of columns.

    Columns that parse as numbers become float arrays; others stay lists.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    out = {}
    for j, name in enumerate(header):
        col = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = col
    return out
