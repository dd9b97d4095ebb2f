"""Binary checkpoint format.

Layout: magic ``FDSN``, u16 format version, then one record per entry:
u32 name length, UTF-8 name, u32 rank, rank * u32 extents and the values as
little-endian float64. All integers are little-endian. The model layout is
stored next to the checkpoint as ``<stem>.json``.
"""

import json
import logging
import struct
import typing
from collections import OrderedDict
from pathlib import Path

import numpy as np

from ..utils.data_classes import ModelConfig
from .model import ModelState

logger = logging.getLogger("general_logger")

MAGIC = b"FDSN"
FORMAT_VERSION = 1


def write_checkpoint(filename: typing.Union[str, Path], values: typing.Mapping[str, np.ndarray]):
    Path(filename).parent.mkdir(parents=True, exist_ok=True)
    with open(filename, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", FORMAT_VERSION))
        for name, value in values.items():
            array = np.asarray(value, dtype="<f8")
            encoded = name.encode("utf-8")
            f.write(struct.pack("<I", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<I", array.ndim))
            if array.ndim:
                f.write(struct.pack(f"<{array.ndim}I", *array.shape))
            f.write(array.tobytes(order="C"))


def read_checkpoint(filename: typing.Union[str, Path]) -> "OrderedDict[str, np.ndarray]":
    """Reads every record of a checkpoint file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the magic, version or a record is malformed.
    """
    if not Path(filename).is_file():
        raise FileNotFoundError(f"checkpoint {filename} not found")
    payload = Path(filename).read_bytes()
    if payload[:4] != MAGIC:
        raise ValueError(f"{filename} is not a checkpoint (bad magic {payload[:4]!r})")
    if len(payload) < 6:
        raise ValueError(f"{filename} is truncated")
    (version,) = struct.unpack_from("<H", payload, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"{filename} has checkpoint format version {version}, expected {FORMAT_VERSION}")

    values = OrderedDict()
    offset = 6
    try:
        while offset < len(payload):
            (length,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            name = payload[offset : offset + length].decode("utf-8")
            offset += length
            (rank,) = struct.unpack_from("<I", payload, offset)
            offset += 4
            shape = struct.unpack_from(f"<{rank}I", payload, offset) if rank else ()
            offset += 4 * rank
            count = int(np.prod(shape)) if rank else 1
            end = offset + 8 * count
            if end > len(payload):
                raise ValueError(f"record {name!r} runs past the end of {filename}")
            values[name] = np.frombuffer(payload[offset:end], dtype="<f8").astype(np.float64).reshape(shape)
            offset = end
    except struct.error as error:
        raise ValueError(f"{filename} is truncated: {error}") from error
    return values


def config_path(filename: typing.Union[str, Path]) -> Path:
    return Path(filename).with_suffix(".json")


def save_state(filename: typing.Union[str, Path], state: ModelState):
    """Writes the checkpoint and its layout sidecar."""
    write_checkpoint(filename, state.values)
    with open(config_path(filename), "w") as f:
        json.dump(state.config.to_dict(), f, indent=2)
    logger.info(f"saved checkpoint {filename} with {len(state)} entries")


def load_state(filename: typing.Union[str, Path]) -> ModelState:
    sidecar = config_path(filename)
    if not sidecar.is_file():
        raise FileNotFoundError(f"model layout file {sidecar} not found next to checkpoint {filename}")
    values = read_checkpoint(filename)
    with open(sidecar) as f:
        config = ModelConfig(**json.load(f))
    logger.info(f"loaded checkpoint {filename} with {len(values)} entries")
    return ModelState(config, values)
