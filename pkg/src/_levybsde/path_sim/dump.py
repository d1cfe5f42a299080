"""Binary path dumps: a 16-byte header (magic, u32 version, u64 count) and <f8 (t, J) records."""

import pathlib
from typing import BinaryIO, Tuple, Union

import numpy as np

from _levybsde import constants
from _levybsde.path_sim.paths import JumpPath

HEADER = np.dtype([("magic", "S4"), ("version", "<u4"), ("count", "<u8")])
RECORD = np.dtype([("t", "<f8"), ("J", "<f8")])


def dump_path(path: JumpPath) -> bytes:
    header = np.array(
        [(constants.PATH_DUMP_MAGIC, constants.PATH_DUMP_VERSION, len(path))],
        dtype=HEADER,
    )
    records = np.empty(len(path), dtype=RECORD)
    records["t"] = path.times
    records["J"] = path.sizes
    return header.tobytes() + records.tobytes()


def write_path_dump(target: Union[str, pathlib.Path, BinaryIO], path: JumpPath):
    payload = dump_path(path)
    if isinstance(target, (str, pathlib.Path)):
        pathlib.Path(target).write_bytes(payload)
    else:
        target.write(payload)


def read_path_dump(
    source: Union[str, pathlib.Path, bytes, BinaryIO]
) -> Tuple[np.ndarray, np.ndarray]:
    """Jump times and sizes stored by :func:`write_path_dump`."""
    if isinstance(source, (str, pathlib.Path)):
        payload = pathlib.Path(source).read_bytes()
    elif isinstance(source, bytes):
        payload = source
    else:
        payload = source.read()

    if len(payload) < HEADER.itemsize:
        raise ValueError("truncated path dump header")
    header = np.frombuffer(payload, dtype=HEADER, count=1)[0]
    if header["magic"] != constants.PATH_DUMP_MAGIC:
        raise ValueError(f"not a path dump, magic={bytes(header['magic'])!r}")
    if header["version"] != constants.PATH_DUMP_VERSION:
        raise ValueError(f"unsupported path dump version {int(header['version'])}")
    count = int(header["count"])
    if len(payload) != HEADER.itemsize + count * RECORD.itemsize:
        raise ValueError(f"path dump declares {count} records but has {len(payload)} bytes")
    if count == 0:
        return np.zeros(0), np.zeros(0)
    records = np.frombuffer(payload, dtype=RECORD, count=count, offset=HEADER.itemsize)
    return records["t"].copy(), records["J"].copy()
