"""Versioned checkpoint container: parameter name -> flat values + a JSON
header with the model configuration. Round-trips are bit-exact at the
stored precision (arrays are saved untouched in npz form).
"""

from __future__ import annotations

import json

import numpy as np

FORMAT_VERSION = 1
_META_KEY = "__meta__"
_PARAM_PREFIX = "param/"


class CheckpointError(ValueError):
    """Malformed, incomplete, or version-incompatible checkpoint."""


def save_checkpoint(path, named_arrays: dict, header: dict) -> None:
    """named_arrays maps parameter name -> ndarray; header is JSON-serializable."""
    if not named_arrays:
        raise CheckpointError("refusing to save a checkpoint with no parameters")
    meta = {"format_version": FORMAT_VERSION, "header": header}
    payload = {_META_KEY: np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8)}
    for name, arr in named_arrays.items():
        if not name:
            raise CheckpointError("every parameter needs a non-empty name")
        key = _PARAM_PREFIX + name
        if key in payload:
            raise CheckpointError(f"duplicate parameter name {name!r}")
        payload[key] = arr
    np.savez(path, **payload)


def load_checkpoint(path):
    """Returns (header dict, {name: ndarray})."""
    with np.load(path, allow_pickle=False) as z:
        if _META_KEY not in z:
            raise CheckpointError("missing checkpoint header")
        meta = json.loads(bytes(z[_META_KEY]).decode("utf-8"))
        version = meta.get("format_version")
        if version != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint format version {version!r}")
        arrays = {}
        for key in z.files:
            if key.startswith(_PARAM_PREFIX):
                arrays[key[len(_PARAM_PREFIX):]] = z[key]
    return meta["header"], arrays
