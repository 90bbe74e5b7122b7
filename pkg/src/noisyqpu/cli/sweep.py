"""Depth and fidelity-scaling sweeps over LR-QAOA circuits."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from noisyqpu.bench.pubo import PuboPolynomial, energy_spectrum
from noisyqpu.bench.qaoa import LrSchedule
from noisyqpu.errors import NoisyQPUError
from noisyqpu.noise.snapshot import DeviceSnapshot, scale_fidelity
from noisyqpu.pipeline import DEFAULT_SHOTS, qaoa_point

COLUMNS = ("index", "x", "factor", "p_tilde_noisy", "p_tilde_ideal", "gain_ratio",
           "two_qubit_gates", "depth", "error")
KINDS = ("depth", "fidelity")


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    points: tuple[float, ...]
    energy: PuboPolynomial
    snapshot: DeviceSnapshot
    depth: int = 1
    half_decades: float = 0.0
    delta_beta: float = 0.5
    delta_gamma: float = 0.5
    fit_model: str = "zeta-delta"
    shots: int = DEFAULT_SHOTS


def scale_factor(half_decades: float) -> float:
    return 10.0 ** (-half_decades / 2)


def _row(args) -> dict:
    index, x, spec, spectrum = args
    if spec.kind == "depth":
        p, factor = int(x), scale_factor(spec.half_decades)
    else:
        p, factor = spec.depth, scale_factor(x)
    row = {"index": index, "x": x, "factor": factor}
    try:
        snap = scale_fidelity(spec.snapshot, factor)
        point = qaoa_point(spec.energy, LrSchedule(p, spec.delta_beta, spec.delta_gamma), snap,
                           model=spec.fit_model, shots=spec.shots, spectrum=spectrum)
        row.update(p_tilde_noisy=point.p_noisy, p_tilde_ideal=point.p_ideal,
                   two_qubit_gates=point.two_qubit_gates, depth=point.depth)
        row["gain_ratio"] = point.gain
    except NoisyQPUError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """One row per point, in input order; failing points carry an ``error`` entry."""
    spectrum = energy_spectrum(spec.energy)
    jobs = [(i, x, spec, spectrum) for i, x in enumerate(spec.points)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_row, jobs))
    return [_row(j) for j in jobs]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in COLUMNS])
    return buf.getvalue()
