"""Experiment configuration files and run records."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from noisyqpu.errors import ValidationError
from noisyqpu.noise.model import NoiseToggles


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Flat ``key = value`` lines; values are read as JSON when possible, else as strings."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value.strip("'\"")
        out[key.replace("-", "_")] = parsed
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file {p} does not exist")
    return parse_config_text(p.read_text(), str(p))


@dataclass(frozen=True)
class ExperimentConfig:
    circuit: str
    snapshot: str | None = None
    synthetic_qubits: int | None = None
    topology: str = "line"
    backend: str = "density"
    shots: int = 4096
    seed: int = 0
    ideal: bool = False
    toggles: NoiseToggles = field(default_factory=NoiseToggles)
    tphi_convention: str = "phenomenological"
    pubo: str | None = None
    fit_model: str = "zeta-delta"

    def __post_init__(self):
        if self.shots < 1:
            raise ValidationError("shots must be at least 1")
        for label, path in (("circuit", self.circuit), ("snapshot", self.snapshot), ("pubo", self.pubo)):
            if path is not None and not Path(path).is_file():
                raise ValidationError(f"{label} file {path} does not exist")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form (stable across runs and machines)."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class RunRecord:
    config_hash: str
    stats: dict[str, int]
    counts: dict[str, Any]
    distribution: dict[str, Any] | None
    fit: dict[str, Any] | None
    wall_clock_s: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
