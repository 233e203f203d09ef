"""Run manifests: reproducibility record for every CLI command.

The manifest lists the command, its arguments, content hashes of all input
files and of every output file written. A rerun with identical inputs must
produce byte-identical outputs, manifest included.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from pathlib import Path

TOOL_VERSION = "0.1.0"
FORMAT_VERSION = 1


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@contextmanager
def atomic_path(final_path):
    """Yield a temp path; on success rename it over the final path."""
    final_path = Path(final_path)
    tmp = final_path.with_name(final_path.name + ".part")
    try:
        yield tmp
        os.replace(tmp, final_path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


class RunManifest:
    """Accumulates inputs/outputs of one command run."""

    def __init__(self, command: str, arguments: dict, out_dir):
        self.command = command
        self.arguments = arguments
        self.out_dir = Path(out_dir)
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}

    def add_input(self, path) -> None:
        self.inputs[str(path)] = sha256_of(path)

    def add_output(self, path) -> None:
        self.outputs[Path(path).name] = sha256_of(path)

    def write(self, name: str = "manifest.json") -> Path:
        doc = {
            "command": self.command,
            "tool_version": TOOL_VERSION,
            "format_version": FORMAT_VERSION,
            "arguments": self.arguments,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        path = self.out_dir / name
        with atomic_path(path) as tmp:
            tmp.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path
