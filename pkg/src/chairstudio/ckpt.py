"""Versioned binary checkpoint container.

Layout: magic, format version, content hash, then a canonical JSON
header followed by raw little-endian tensor blobs. The hash covers
everything after itself, and serialization is canonical (sorted keys,
sorted tensor names, fixed separators), so save -> load -> save is
byte-identical and any corruption is detectable.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import hashlib
import numpy as np
import torch

from .errors import CheckpointError

MAGIC = b"CSCK"
FORMAT_VERSION = 1

_DTYPES = {
    "float32": torch.float32,
    "float64": torch.float64,
    "int64": torch.int64,
    "uint8": torch.uint8,
}


def _tensor_bytes(t: torch.Tensor) -> bytes:
    return t.detach().contiguous().cpu().numpy().tobytes()


@dataclass
class ModelCheckpoint:
    """Immutable snapshot of a model pair: config, tensors, and metadata."""

    kind: str
    config: dict
    meta: dict
    tensors: dict[str, torch.Tensor] = field(default_factory=dict)
    content_hash: str = ""

    def _payload(self) -> bytes:
        entries = []
        blobs = []
        offset = 0
        for name in sorted(self.tensors):
            t = self.tensors[name]
            dtype = str(t.dtype).removeprefix("torch.")
            if dtype not in _DTYPES:
                raise CheckpointError(f"unsupported tensor dtype {dtype} for {name}")
            raw = _tensor_bytes(t)
            entries.append(
                {
                    "name": name,
                    "dtype": dtype,
                    "shape": list(t.shape),
                    "offset": offset,
                    "nbytes": len(raw),
                }
            )
            blobs.append(raw)
            offset += len(raw)
        header = {
            "kind": self.kind,
            "config": self.config,
            "meta": self.meta,
            "tensors": entries,
        }
        header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        return struct.pack("<Q", len(header_bytes)) + header_bytes + b"".join(blobs)

    def save(self, path: str | Path) -> str:
        """Write the container; returns the content hash."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = self._payload()
        digest = hashlib.sha256(payload).digest()
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<I", FORMAT_VERSION))
            f.write(digest)
            f.write(payload)
        self.content_hash = digest.hex()
        return self.content_hash

    @classmethod
    def load(cls, path: str | Path) -> "ModelCheckpoint":
        path = Path(path)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
        if len(data) < 48 or data[:4] != MAGIC:
            raise CheckpointError(f"{path} is not a checkpoint container")
        (version,) = struct.unpack_from("<I", data, 4)
        if version != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        stored_digest = data[8:40]
        payload = data[40:]
        if hashlib.sha256(payload).digest() != stored_digest:
            raise CheckpointError(f"{path} failed its content-hash check")
        (header_len,) = struct.unpack_from("<Q", payload, 0)
        header = json.loads(payload[8 : 8 + header_len].decode())
        blob_base = 8 + header_len
        tensors: dict[str, torch.Tensor] = {}
        for entry in header["tensors"]:
            start = blob_base + entry["offset"]
            raw = payload[start : start + entry["nbytes"]]
            arr = np.frombuffer(raw, dtype=entry["dtype"]).reshape(entry["shape"]).copy()
            tensors[entry["name"]] = torch.from_numpy(arr).to(_DTYPES[entry["dtype"]])
        return cls(
            kind=header["kind"],
            config=header["config"],
            meta=header["meta"],
            tensors=tensors,
            content_hash=stored_digest.hex(),
        )


def load_checkpoint(path: str | Path, expect_kind: str | None = None) -> ModelCheckpoint:
    ckpt = ModelCheckpoint.load(path)
    if expect_kind is not None and ckpt.kind != expect_kind:
        raise CheckpointError(f"{path}: expected kind {expect_kind!r}, got {ckpt.kind!r}")
    return ckpt


def module_tensors(prefix: str, module: torch.nn.Module) -> dict[str, torch.Tensor]:
    """Flatten a module state dict under a name prefix."""
    return {f"{prefix}/{k}": v for k, v in module.state_dict().items()}


def optimizer_tensors(
    prefix: str, optimizer: torch.optim.Optimizer, module: torch.nn.Module
) -> dict[str, torch.Tensor]:
    """Flatten per-parameter optimizer state using parameter names as keys."""
    names = {id(p): n for n, p in module.named_parameters()}
    out: dict[str, torch.Tensor] = {}
    for param, state in optimizer.state.items():
        pname = names[id(param)]
        for key, value in state.items():
            if not torch.is_tensor(value):
                value = torch.tensor(value, dtype=torch.float64)
            out[f"{prefix}/{pname}/{key}"] = value
    return out


def restore_module(prefix: str, module: torch.nn.Module, tensors: dict) -> None:
    state = {
        k.removeprefix(f"{prefix}/"): v
        for k, v in tensors.items()
        if k.startswith(f"{prefix}/") and k.count("/") == 1
    }
    # num_batches_tracked etc. keep their original dtypes via strict load
    module.load_state_dict(
        {k: v.to(dict(module.state_dict())[k].dtype) for k, v in state.items()}
    )


def restore_optimizer(
    prefix: str,
    optimizer: torch.optim.Optimizer,
    module: torch.nn.Module,
    tensors: dict,
) -> None:
    params = dict(module.named_parameters())
    for key, value in tensors.items():
        if not key.startswith(f"{prefix}/"):
            continue
        _, pname, skey = key.rsplit("/", 2)
        param = params[pname]
        state = optimizer.state.setdefault(param, {})
        state[skey] = value.clone()
