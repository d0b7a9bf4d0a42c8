"""Run manifests and atomic output writing for reproducible CLI runs."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .params_io import canonical_json

CODE_VERSION = "0.1.0"


def config_hash(payload) -> str:
    """sha256 of the canonical JSON form; stable across key ordering."""
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory plus rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x) -> str:
    """Full-precision number formatting for lossless CSV round-trips."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int,)):
        return str(x)
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2,
                                       default=_json_default) + "\n")


def _json_default(obj):
    import numpy as np

    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


@dataclass
class RunManifest:
    """Provenance record emitted next to every command's outputs."""

    command_line: str
    config_hash: str
    master_seed: int
    code_version: str = CODE_VERSION
    started: str = ""
    finished: str = ""
    worker_count: int = 1
    outputs: list = field(default_factory=list)

    def start(self):
        self.started = datetime.now(timezone.utc).isoformat()
        return self

    def finish(self):
        self.finished = datetime.now(timezone.utc).isoformat()
        return self

    def write(self, out_dir) -> Path:
        path = Path(out_dir) / "manifest.json"
        write_json(path, self.__dict__)
        return path
