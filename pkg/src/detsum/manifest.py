"""Run manifests: '#' header lines written at the top of every output file."""

from __future__ import annotations

import hashlib
import json
import shlex
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import __version__


@dataclass(frozen=True)
class RunManifest:
    command_line: tuple
    config_hash: str
    seed: int | None
    tool_version: str
    wall_time: float
    outputs: tuple

    def header_lines(self) -> list[str]:
        return [
            f"# detsum {self.tool_version}",
            f"# command: {shlex.join(self.command_line)}",
            f"# config_sha256: {self.config_hash}",
            f"# seed: {'' if self.seed is None else self.seed}",
            f"# wall_time_s: {self.wall_time:.3f}",
            f"# outputs: {', '.join(self.outputs)}",
        ]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def make_manifest(argv, config: dict, seed, wall_time: float, outputs) -> RunManifest:
    return RunManifest(tuple(argv), config_hash(config), seed, __version__, wall_time, tuple(str(o) for o in outputs))


def write_outputs(files: dict, manifest: RunManifest) -> None:
    """Write ``{path: text}`` with the manifest header prepended to each."""
    head = "\n".join(manifest.header_lines()) + "\n"
    for path, body in files.items():
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(head + body)


def strip_header(text: str) -> str:
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def load_json(path) -> object:
    """Parse a JSON output file, skipping its manifest header."""
    return json.loads(strip_header(Path(path).read_text()))


def load_schema(name: str) -> dict:
    return json.loads(resources.files("detsum").joinpath("schemas", f"{name}.schema.json").read_text())
