"""Distances and divergences between outcome distributions.

Inputs are dense probability vectors or sparse ``{bitstring: probability}``
maps (``CountsHistogram`` instances are normalised on the fly).
"""

from __future__ import annotations

import math
from typing import Mapping

import numpy as np
from scipy.special import rel_entr

from noisyqpu.densim.counts import CountsHistogram
from noisyqpu.errors import ValidationError


def _as_map(d) -> Mapping[str, float] | None:
    if isinstance(d, CountsHistogram):
        total = d.shots
        return {k: v / total for k, v in d.counts.items()}
    if isinstance(d, Mapping):
        return d
    return None


def align(p, q) -> tuple[np.ndarray, np.ndarray]:
    """Two aligned probability vectors over the same index space."""
    mp, mq = _as_map(p), _as_map(q)
    if mp is not None or mq is not None:
        if mp is None or mq is None:
            raise ValidationError("cannot compare a sparse map with a dense vector")
        lengths = {len(k) for k in mp} | {len(k) for k in mq}
        if len(lengths) > 1:
            raise ValidationError(f"bitstring lengths differ: {sorted(lengths)}")
        keys = sorted(set(mp) | set(mq))
        a = np.array([mp.get(k, 0.0) for k in keys], dtype=float)
        b = np.array([mq.get(k, 0.0) for k in keys], dtype=float)
    else:
        a, b = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
        if a.shape != b.shape:
            raise ValidationError(f"dimension mismatch: {a.shape} vs {b.shape}")
    for v in (a, b):
        if np.any(v < 0):
            raise ValidationError("probabilities must be non-negative")
        if abs(v.sum() - 1) > 1e-9:
            raise ValidationError(f"probabilities sum to {v.sum()}, not 1")
    return a, b


def classical_fidelity(p, q) -> float:
    a, b = align(p, q)
    return float(min(1.0, np.sum(np.sqrt(a * b))))


def hellinger(p, q) -> float:
    a, b = align(p, q)
    return float(min(1.0, math.sqrt(0.5 * np.sum((np.sqrt(a) - np.sqrt(b)) ** 2))))


def total_variation(p, q) -> float:
    a, b = align(p, q)
    return float(0.5 * np.abs(a - b).sum())


def kullback_leibler(p, q) -> float:
    """KL(p || q) in nats; ``math.inf`` when p has mass where q has none."""
    a, b = align(p, q)
    return float(np.sum(rel_entr(a, b)))


def jensen_shannon(p, q) -> float:
    """Jensen-Shannon divergence in nats, bounded by ln 2."""
    a, b = align(p, q)
    m = 0.5 * (a + b)
    return float(0.5 * np.sum(rel_entr(a, m)) + 0.5 * np.sum(rel_entr(b, m)))
