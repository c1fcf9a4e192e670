"""Checkpoint serialization.

Binary layout (little-endian, documented in docs/checkpoint-format.md):

    bytes 0..7    magic b"MAGNETCK"
    u32           format version (currently 1)
    u64           header length in bytes
    header        UTF-8 JSON: config, vocab, seed, best_val_loss and a tensor
                  manifest [{name, shape, offset}] in sorted name order
    payload       raw float64 tensor data, concatenated per the manifest

Serialization is canonical (sorted keys, fixed separators), so identical
training runs produce byte-identical files.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CheckpointError
from .featurize import Vocab
from .network import ModelConfig
from .optim import ParameterSet

MAGIC = b"MAGNETCK"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    config: ModelConfig
    vocab: Vocab
    tensors: dict[str, np.ndarray]
    seed: int
    best_val_loss: float
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_params(cls, params: ParameterSet, config: ModelConfig, vocab: Vocab,
                    seed: int, best_val_loss: float) -> "Checkpoint":
        tensors = {name: arr.copy() for name, arr in params.arrays().items()}
        return cls(config=config, vocab=vocab, tensors=tensors,
                   seed=seed, best_val_loss=best_val_loss)

    def to_params(self) -> ParameterSet:
        params = ParameterSet()
        for name, arr in self.tensors.items():
            params.add(name, arr.copy())
        return params


def save_checkpoint(ckpt: Checkpoint, path: str | Path):
    names = sorted(ckpt.tensors)
    manifest = []
    offset = 0
    for name in names:
        arr = ckpt.tensors[name]
        manifest.append({"name": name, "shape": list(arr.shape), "offset": offset})
        offset += arr.size * 8
    header = {
        "config": ckpt.config.to_dict(),
        "vocab": ckpt.vocab.to_dict(),
        "seed": ckpt.seed,
        "best_val_loss": ckpt.best_val_loss,
        "tensors": manifest,
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", ckpt.format_version))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for name in names:
            fh.write(np.ascontiguousarray(ckpt.tensors[name], dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}")
    if blob[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file (bad magic)")
    version = struct.unpack("<I", blob[8:12])[0]
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: format version {version} unsupported "
                              f"(expected {FORMAT_VERSION})")
    header_len = struct.unpack("<Q", blob[12:20])[0]
    header = json.loads(blob[20:20 + header_len].decode("utf-8"))
    payload = blob[20 + header_len:]
    tensors = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape)) * 8
        raw = payload[entry["offset"]:entry["offset"] + size]
        if len(raw) != size:
            raise CheckpointError(f"{path}: truncated tensor {entry['name']!r}")
        tensors[entry["name"]] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    return Checkpoint(
        config=ModelConfig.from_dict(header["config"]),
        vocab=Vocab.from_dict(header["vocab"]),
        tensors=tensors,
        seed=int(header["seed"]),
        best_val_loss=float(header["best_val_loss"]),
        format_version=version,
    )
