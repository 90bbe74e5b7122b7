"""Shot histograms and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from noisyqpu.errors import ValidationError

BIT_ORDER = "q0-lsb"


def bitstring(index: int, n: int) -> str:
    """q0-lsb bitstring: qubit 0 is the right-most character."""
    return format(index, f"0{n}b") if n else ""


@dataclass(frozen=True)
class CountsHistogram:
    n: int
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, v in self.counts.items():
            if len(k) != self.n or set(k) - {"0", "1"}:
                raise ValidationError(f"bad bitstring {k!r} for {self.n} bits")
            if v < 0:
                raise ValidationError("counts must be non-negative")
            if v:
                clean[k] = v
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    @property
    def shots(self):
        return sum(self.counts.values())

    def indices(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.array([int(k, 2) for k in self.counts], dtype=np.int64)
        return idx, np.array(list(self.counts.values()), dtype=float)

    def to_vector(self) -> np.ndarray:
        v = np.zeros(1 << self.n)
        idx, c = self.indices()
        v[idx] = c
        return v

    def frequencies(self) -> np.ndarray:
        return self.to_vector() / self.shots

    @classmethod
    def from_vector(cls, vec, n: int | None = None) -> "CountsHistogram":
        vec = np.asarray(vec)
        n = int(np.log2(len(vec))) if n is None else n
        return cls(n, {bitstring(i, n): (int(c) if float(c).is_integer() else float(c))
                       for i, c in enumerate(vec) if c})

    def to_dict(self) -> dict[str, Any]:
        return {"shots": self.shots, "counts": dict(self.counts), "bit_order": BIT_ORDER}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CountsHistogram":
        if d.get("bit_order", BIT_ORDER) != BIT_ORDER:
            raise ValidationError(f"$.bit_order: only {BIT_ORDER!r} is supported")
        counts = d.get("counts")
        if not isinstance(counts, Mapping) or not counts:
            raise ValidationError("$.counts: expected a non-empty object")
        n = len(next(iter(counts)))
        hist = cls(n, dict(counts))
        if "shots" in d and d["shots"] != hist.shots:
            raise ValidationError(f"$.shots: {d['shots']} does not match the sum of counts {hist.shots}")
        return hist

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def sample_counts(distribution, shots: int, seed: int | None = 0) -> CountsHistogram:
    p = np.clip(np.asarray(distribution, dtype=float), 0, None)
    if shots <= 0:
        raise ValidationError("shots must be positive")
    n = int(round(np.log2(len(p))))
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p / p.sum())
    return CountsHistogram(n, {bitstring(i, n): int(c) for i, c in enumerate(draws) if c})


def distribution_to_dict(p: np.ndarray) -> dict[str, Any]:
    n = int(round(np.log2(len(p))))
    return {"probabilities": {bitstring(i, n): float(v) for i, v in enumerate(p) if v > 0},
            "bit_order": BIT_ORDER}
