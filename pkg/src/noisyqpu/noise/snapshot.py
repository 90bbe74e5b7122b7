"""Device calibration snapshots: per-qubit and per-gate noise parameters."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from noisyqpu.errors import MissingCalibration, MissingDuration, ValidationError
from noisyqpu.qcore.circuit import Topology
from noisyqpu.qcore.transpile import normalize_gateset

# Reference magnitudes used by the synthetic generator.
DEFAULT_T1 = 1.0e-5
DEFAULT_T2 = 1.0e-5
DEFAULT_1Q_FIDELITY = 0.9996
DEFAULT_2Q_FIDELITY = 0.97
DEFAULT_READOUT = 0.01
DEFAULT_1Q_DURATION = 3.5e-8
DEFAULT_2Q_DURATION = 5.0e-7
DEFAULT_BASIS = ("rz", "sx", "x", "ecr")


@dataclass(frozen=True)
class QubitParams:
    t1: float
    t2: float
    readout_e0: float = 0.0
    readout_e1: float = 0.0
    init_e1: float = 0.0


@dataclass(frozen=True)
class GateParams:
    name: str
    qubits: tuple[int, ...]
    fidelity: float
    duration: float


def _check_prob(value: float, where: str) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{where}: probability {value} outside [0, 1]")


@dataclass(frozen=True)
class DeviceSnapshot:
    qubits: tuple[QubitParams, ...]
    gates: tuple[GateParams, ...]
    topology: Topology
    basis: tuple[str, ...] = DEFAULT_BASIS
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "basis", tuple(b.lower() for b in self.basis))
        normalize_gateset(self.basis)
        if self.topology.num_qubits != len(self.qubits):
            raise ValidationError(
                f"$.topology: {self.topology.num_qubits} qubits but {len(self.qubits)} qubit entries")
        for i, q in enumerate(self.qubits):
            where = f"$.qubits[{i}]"
            if not q.t1 > 0:
                raise ValidationError(f"{where}.t1_s: must be positive")
            if not 0 < q.t2 <= 2 * q.t1 * (1 + 1e-12):
                raise ValidationError(f"{where}.t2_s: need 0 < T2 <= 2*T1")
            _check_prob(q.readout_e0, f"{where}.readout_e0")
            _check_prob(q.readout_e1, f"{where}.readout_e1")
            _check_prob(q.init_e1, f"{where}.init_e1")
        index = {}
        for i, g in enumerate(self.gates):
            where = f"$.gates[{i}]"
            if not 0 < g.fidelity <= 1:
                raise ValidationError(f"{where}.fidelity: must lie in (0, 1]")
            if not g.duration >= 0:
                raise ValidationError(f"{where}.duration_s: must be non-negative")
            if any(not 0 <= q < len(self.qubits) for q in g.qubits):
                raise ValidationError(f"{where}.qubits: unknown qubit in {list(g.qubits)}")
            index[(g.name, g.qubits)] = g
        object.__setattr__(self, "_index", index)

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def gate(self, name: str, qubits: Sequence[int]) -> GateParams:
        key = (name.lower(), tuple(qubits))
        g = self._index.get(key)
        if g is None and len(qubits) == 2:
            g = self._index.get((key[0], key[1][::-1]))
        if g is None:
            raise MissingCalibration(f"no calibration for gate {name} on qubits {list(qubits)}")
        return g

    def gate_duration(self, name: str, qubits: Sequence[int]) -> float:
        try:
            return self.gate(name, qubits).duration
        except MissingCalibration:
            raise MissingDuration(f"no duration for gate {name} on qubits {list(qubits)}") from None

    def gate_fidelity(self, name: str, qubits: Sequence[int]) -> float:
        return self.gate(name, qubits).fidelity

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        def t(x):
            return None if math.isinf(x) else x

        return {
            "qubits": [
                {"t1_s": t(q.t1), "t2_s": t(q.t2), "readout_e0": q.readout_e0,
                 "readout_e1": q.readout_e1, "init_e1": q.init_e1}
                for q in self.qubits
            ],
            "gates": [
                {"name": g.name, "qubits": list(g.qubits), "fidelity": g.fidelity, "duration_s": g.duration}
                for g in self.gates
            ],
            "topology": self.topology.pairs(),
            "basis": list(self.basis),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "DeviceSnapshot":
        def num(obj, key, where, default=None):
            if key not in obj:
                if default is not None:
                    return default
                raise ValidationError(f"{where}: missing {key!r}")
            v = obj[key]
            if v is None and key in ("t1_s", "t2_s"):
                return math.inf
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValidationError(f"{where}.{key}: expected a number, got {v!r}")
            return float(v)

        if not isinstance(d, Mapping):
            raise ValidationError("$: expected an object")
        for key in ("qubits", "gates"):
            if not isinstance(d.get(key), list):
                raise ValidationError(f"$.{key}: expected a list")
        qubits = []
        for i, q in enumerate(d["qubits"]):
            w = f"$.qubits[{i}]"
            if not isinstance(q, Mapping):
                raise ValidationError(f"{w}: expected an object")
            qubits.append(QubitParams(
                num(q, "t1_s", w), num(q, "t2_s", w), num(q, "readout_e0", w, 0.0),
                num(q, "readout_e1", w, 0.0), num(q, "init_e1", w, 0.0)))
        gates = []
        for i, g in enumerate(d["gates"]):
            w = f"$.gates[{i}]"
            if not isinstance(g, Mapping) or not isinstance(g.get("name"), str):
                raise ValidationError(f"{w}.name: expected a string")
            if not isinstance(g.get("qubits"), list) or not g["qubits"]:
                raise ValidationError(f"{w}.qubits: expected a non-empty list")
            gates.append(GateParams(g["name"].lower(), tuple(int(q) for q in g["qubits"]),
                                    num(g, "fidelity", w), num(g, "duration_s", w)))
        pairs = d.get("topology", [])
        if not isinstance(pairs, list) or any(not isinstance(p, list) or len(p) != 2 for p in pairs):
            raise ValidationError("$.topology: expected a list of qubit pairs")
        basis = d.get("basis", list(DEFAULT_BASIS))
        return cls(tuple(qubits), tuple(gates), Topology.from_pairs(len(qubits), pairs), tuple(basis))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DeviceSnapshot":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"$: invalid JSON ({exc})") from None
        return cls.from_dict(data)


def _topology(kind: str, n: int) -> Topology:
    if kind == "line":
        return Topology.line(n)
    if kind == "ring":
        return Topology.ring(n)
    if kind == "full":
        return Topology.full(n)
    raise ValidationError(f"unknown topology kind {kind!r}")


def synthetic_snapshot(
    num_qubits: int,
    topology: str | Topology = "line",
    *,
    t1: float = DEFAULT_T1,
    t2: float = DEFAULT_T2,
    fidelity_1q: float = DEFAULT_1Q_FIDELITY,
    fidelity_2q: float = DEFAULT_2Q_FIDELITY,
    readout: float = DEFAULT_READOUT,
    init_e1: float = 0.0,
    duration_1q: float = DEFAULT_1Q_DURATION,
    duration_2q: float = DEFAULT_2Q_DURATION,
    basis: Iterable[str] = DEFAULT_BASIS,
    spread: float = 0.0,
    seed: int = 0,
) -> DeviceSnapshot:
    """Snapshot with defaults typical of a current superconducting device.

    ``spread`` > 0 multiplies T1/T2 by lognormal factors and error rates by
    independent ones, mimicking qubit-to-qubit variation; spread 0 gives a
    homogeneous device.  RZ is virtual (duration 0, fidelity 1).
    """
    topo = topology if isinstance(topology, Topology) else _topology(topology, num_qubits)
    basis = tuple(b.lower() for b in basis)
    rng = np.random.default_rng(seed)

    def jitter() -> float:
        return float(np.exp(spread * rng.standard_normal())) if spread > 0 else 1.0

    def err(e: float) -> float:
        return min(1.0, e * jitter())

    qubits = []
    for _ in range(num_qubits):
        q_t1 = t1 * jitter()
        q_t2 = min(t2 * jitter(), 2 * q_t1)
        qubits.append(QubitParams(q_t1, q_t2, err(readout), err(readout), err(init_e1)))
    gates = []
    for q in range(num_qubits):
        for name in basis:
            if name == "rz":
                gates.append(GateParams("rz", (q,), 1.0, 0.0))
            elif name in ("sx", "x"):
                gates.append(GateParams(name, (q,), 1.0 - err(1.0 - fidelity_1q), duration_1q))
    for a, b in topo.pairs():
        for name in basis:
            if name in ("ecr", "cz"):
                gates.append(GateParams(name, (a, b), 1.0 - err(1.0 - fidelity_2q), duration_2q))
    return DeviceSnapshot(tuple(qubits), tuple(gates), topo, basis)


def _scale_err(e: float, factor: float) -> float:
    return min(1.0, max(0.0, factor * e))


def scale_fidelity(snapshot: DeviceSnapshot, factor: float, *, scale_decoherence: bool = False) -> DeviceSnapshot:
    """Multiply every gate, readout and init error by ``factor`` (clamped to [0, 1]).

    Decoherence times are left alone unless ``scale_decoherence`` is set, in
    which case the rates 1/T1 and 1/T2 are scaled by the same factor.
    """
    if not factor >= 0:
        raise ValidationError("scale factor must be non-negative")
    if factor == 1:
        return snapshot
    qubits = []
    for q in snapshot.qubits:
        t1, t2 = q.t1, q.t2
        if scale_decoherence:
            t1 = t1 / factor if factor > 0 else math.inf
            t2 = t2 / factor if factor > 0 else math.inf
        qubits.append(QubitParams(t1, t2, _scale_err(q.readout_e0, factor),
                                  _scale_err(q.readout_e1, factor), _scale_err(q.init_e1, factor)))
    gates = [replace(g, fidelity=1.0 - _scale_err(1.0 - g.fidelity, factor)) for g in snapshot.gates]
    return DeviceSnapshot(tuple(qubits), tuple(gates), snapshot.topology, snapshot.basis)


def median_snapshot(snapshot: DeviceSnapshot) -> DeviceSnapshot:
    """Replace each parameter by its device-wide median (per gate name for gates)."""
    if not snapshot.qubits:
        raise ValidationError("snapshot has no qubits")
    med = lambda xs: float(np.median(np.asarray(xs, dtype=float)))  # noqa: E731
    qs = snapshot.qubits
    t1 = med([q.t1 for q in qs])
    t2 = min(med([q.t2 for q in qs]), 2 * t1)
    common = QubitParams(t1, t2, med([q.readout_e0 for q in qs]), med([q.readout_e1 for q in qs]),
                         med([q.init_e1 for q in qs]))
    by_name: dict[str, list[GateParams]] = {}
    for g in snapshot.gates:
        by_name.setdefault(g.name, []).append(g)
    fid = {k: med([g.fidelity for g in v]) for k, v in by_name.items()}
    dur = {k: med([g.duration for g in v]) for k, v in by_name.items()}
    gates = tuple(GateParams(g.name, g.qubits, fid[g.name], dur[g.name]) for g in snapshot.gates)
    return DeviceSnapshot((common,) * len(qs), gates, snapshot.topology, snapshot.basis)
