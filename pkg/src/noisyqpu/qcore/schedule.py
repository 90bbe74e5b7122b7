"""As-soon-as-possible scheduling with explicit idle intervals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

from noisyqpu.qcore.circuit import Circuit


class DurationSource(Protocol):
    def gate_duration(self, name: str, qubits: Sequence[int]) -> float: ...


@dataclass(frozen=True)
class Interval:
    start: float
    end: float
    instruction: int | None  # index into circuit.instructions; None = IDLE

    @property
    def idle(self) -> bool:
        return self.instruction is None

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class Schedule:
    timelines: tuple[tuple[Interval, ...], ...]
    makespan: float

    def timeline(self, q: int) -> tuple[Interval, ...]:
        return self.timelines[q]

    def idle_intervals(self, q: int) -> list[Interval]:
        return [iv for iv in self.timelines[q] if iv.idle]


def schedule_asap(circuit: Circuit, durations: DurationSource | Callable[[str, Sequence[int]], float]) -> Schedule:
    """Schedule every instruction as early as its qubits allow.

    Barriers synchronise their qubits, delays last for their parameter and
    measurements are zero-length events placed at the makespan, so every
    qubit's timeline is contiguous from 0 to the end of the circuit.
    Raises ``MissingDuration`` (from the duration source) for unknown gates.
    """
    lookup = durations.gate_duration if hasattr(durations, "gate_duration") else durations
    n = circuit.num_qubits
    ready = [0.0] * n
    lines: list[list[Interval]] = [[] for _ in range(n)]

    def pad(q: int, t: float) -> None:
        if t > ready[q]:
            lines[q].append(Interval(ready[q], t, None))
            ready[q] = t

    measures = []
    for idx, g in enumerate(circuit.instructions):
        if g.name == "measure":
            measures.append((idx, g.qubits[0]))
            continue
        start = max(ready[q] for q in g.qubits)
        for q in g.qubits:
            pad(q, start)
        if g.name == "barrier":
            continue
        dur = g.params[0] if g.name == "delay" else float(lookup(g.name, g.qubits))
        for q in g.qubits:
            lines[q].append(Interval(start, start + dur, idx))
            ready[q] = start + dur
    makespan = max(ready, default=0.0)
    for q in range(n):
        pad(q, makespan)
    for idx, q in measures:
        lines[q].append(Interval(makespan, makespan, idx))
    return Schedule(tuple(tuple(l) for l in lines), makespan)
