"""Noise model assembly and the noise-insertion pass."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from noisyqpu.errors import MissingCalibration, ValidationError
from noisyqpu.noise.channels import (
    PHENOMENOLOGICAL, KrausChannel, decoherence_channel, depolarizing_channel, init_error_state,
    measurement_error_confusion, unitary_mixture,
)
from noisyqpu.noise.snapshot import DeviceSnapshot
from noisyqpu.qcore.circuit import Circuit, gate_matrix
from noisyqpu.qcore.schedule import Schedule
from noisyqpu.qcore.transpile import measure_order


@dataclass(frozen=True)
class NoiseToggles:
    init: bool = True
    decoherence: bool = True
    depolarizing: bool = True
    readout: bool = True

    @classmethod
    def none(cls) -> "NoiseToggles":
        return cls(False, False, False, False)

    @property
    def any(self) -> bool:
        return self.init or self.decoherence or self.depolarizing or self.readout


@dataclass(frozen=True)
class Operation:
    """A Kraus map on local qubits; unitaries are single-operator maps."""

    label: str
    qubits: tuple[int, ...]
    channel: KrausChannel

    @property
    def is_unitary(self) -> bool:
        return len(self.channel.operators) == 1

    @property
    def mixture(self):
        return _mixture(self.channel)


def _mixture(channel: KrausChannel):
    cached = getattr(channel, "_mixture", None)
    if cached is None:
        cached = unitary_mixture(channel) or False
        object.__setattr__(channel, "_mixture", cached)
    return cached or None


@dataclass(frozen=True)
class NoisyProgram:
    """Compiled noisy evolution on the circuit's active qubits.

    ``physical[i]`` is the device qubit behind local qubit ``i``; ``measured``
    lists local qubits in logical outcome order (bit k of an outcome index is
    ``measured[k]``) and ``confusion`` holds one readout matrix per entry.
    """

    physical: tuple[int, ...]
    init_states: tuple[np.ndarray, ...]
    operations: tuple[Operation, ...]
    measured: tuple[int, ...]
    confusion: tuple[np.ndarray, ...]
    metadata: dict = field(default_factory=dict)

    @property
    def num_qubits(self) -> int:
        return len(self.physical)

    def describe(self) -> list[str]:
        head = ["init"]
        tail = (["confusion"] if any(not np.array_equal(c, np.eye(2)) for c in self.confusion) else []) + ["measure"]
        return head + [op.label for op in self.operations] + tail


class NoiseModel:
    """Channel factories for one device snapshot."""

    def __init__(self, snapshot: DeviceSnapshot, toggles: NoiseToggles | None = None,
                 tphi_convention: str = PHENOMENOLOGICAL):
        self.snapshot = snapshot
        self.toggles = toggles or NoiseToggles()
        self.tphi_convention = tphi_convention
        self._cache: dict = {}

    def _qubit(self, q: int):
        if not 0 <= q < self.snapshot.num_qubits:
            raise MissingCalibration(f"no calibration for qubit {q}")
        return self.snapshot.qubits[q]

    def idle(self, q: int, t: float) -> KrausChannel:
        p = self._qubit(q)
        return decoherence_channel(p.t1, p.t2, t, self.tphi_convention)

    def after_gate(self, name: str, qubits: Sequence[int]) -> KrausChannel:
        key = ("gate", name, tuple(qubits))
        if key not in self._cache:
            f = self.snapshot.gate_fidelity(name, qubits)
            self._cache[key] = depolarizing_channel(f, len(qubits))
        return self._cache[key]

    def before_measure(self, q: int) -> np.ndarray:
        p = self._qubit(q)
        return measurement_error_confusion(p.readout_e0, p.readout_e1)

    def at_init(self, q: int) -> np.ndarray:
        return init_error_state(self._qubit(q).init_e1)


def _gate_unitary(name: str, params: tuple, nq: int) -> KrausChannel:
    return KrausChannel((gate_matrix(name, params, nq),))


def apply_noise_pass(circuit: Circuit, schedule: Schedule, model: NoiseModel | None) -> NoisyProgram:
    """Interleave the circuit with init, idle, gate and readout noise.

    Passing ``model=None`` (or a model with every toggle off) yields the
    noiseless program.  Qubits that no instruction touches are dropped.
    """
    toggles = model.toggles if model is not None else NoiseToggles.none()
    active = sorted({q for g in circuit.instructions if g.name != "barrier" for q in g.qubits})
    local = {q: i for i, q in enumerate(active)}
    basis = set(model.snapshot.basis) | {"delay", "measure", "barrier"} if model is not None else None

    # idle time accumulated on each qubit right before each instruction
    pending: dict[tuple[int, int], float] = {}
    for q in active:
        acc = 0.0
        for iv in schedule.timeline(q):
            g = circuit.instructions[iv.instruction] if iv.instruction is not None else None
            if g is None or g.name == "delay":
                acc += iv.length
            else:
                if acc > 0:
                    pending[(iv.instruction, q)] = acc
                acc = 0.0

    ops: list[Operation] = []
    for idx, g in enumerate(circuit.instructions):
        if g.name in ("barrier", "delay"):
            continue
        if basis is not None and g.name not in basis and toggles.any:
            raise ValidationError(f"gate {g.name} is not in the device basis {sorted(basis)}; substitute first")
        if toggles.decoherence:
            for q in g.qubits:
                t = pending.get((idx, q), 0.0)
                if t > 0:
                    ops.append(Operation("decoherence", (local[q],), model.idle(q, t)))
        if g.name == "measure":
            continue
        lq = tuple(local[q] for q in g.qubits)
        ops.append(Operation(g.name, lq, _gate_unitary(g.name, g.params, len(g.qubits))))
        if toggles.depolarizing:
            ch = model.after_gate(g.name, g.qubits)
            if not ch.is_identity():
                ops.append(Operation("depolarizing", lq, ch))

    init = tuple(model.at_init(q) if toggles.init else np.diag([1.0, 0.0]).astype(complex) for q in active)
    measured_phys = measure_order(circuit)
    measured = tuple(local[q] for q in measured_phys)
    confusion = tuple(model.before_measure(q) if toggles.readout else np.eye(2) for q in measured_phys)
    meta = {"stats": circuit.stats(), "makespan": schedule.makespan}
    return NoisyProgram(tuple(active), init, tuple(ops), measured, confusion, meta)
