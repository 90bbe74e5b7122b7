"""Characterisation circuits: idle relaxation, Hahn echo, tiled GHZ."""

from __future__ import annotations

from typing import Sequence

from noisyqpu.errors import InvalidParameter, InvalidTriplet
from noisyqpu.qcore.circuit import CX, Circuit, Delay, H, Measure, Topology, X


def _duration(t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise InvalidParameter(f"delay must be non-negative, got {t}")
    return t


def idle_t1_circuit(t: float) -> Circuit:
    t = _duration(t)
    return Circuit(1, (X(0), Delay(t, 0), Measure(0)), {"benchmark": "idle-t1", "t": t})


def hahn_echo_circuit(t: float) -> Circuit:
    t = _duration(t)
    return Circuit(
        1,
        (H(0), Delay(t / 2, 0), X(0), Delay(t / 2, 0), H(0), Measure(0)),
        {"benchmark": "hahn-echo", "t": t},
    )


def ghz_tiled_circuit(topology: Topology, triplets: Sequence[Sequence[int]]) -> Circuit:
    """One 3-qubit GHZ preparation per triplet ``(a, b, c)`` along the path a-b-c."""
    seen: set[int] = set()
    gates = []
    for trip in triplets:
        trip = tuple(int(q) for q in trip)
        if len(trip) != 3 or len(set(trip)) != 3:
            raise InvalidTriplet(f"{trip} is not three distinct qubits")
        if any(q < 0 or q >= topology.num_qubits for q in trip):
            raise InvalidTriplet(f"{trip} leaves the {topology.num_qubits}-qubit device")
        a, b, c = trip
        if not (topology.adjacent(a, b) and topology.adjacent(b, c)):
            raise InvalidTriplet(f"{trip} is not a connected path in the topology")
        if seen.intersection(trip):
            raise InvalidTriplet(f"{trip} overlaps another triplet")
        seen.update(trip)
        gates += [H(a), CX(a, b), CX(b, c)]
    if not seen:
        raise InvalidTriplet("no triplets given")
    gates += [Measure(q) for q in sorted(seen)]
    return Circuit(topology.num_qubits, gates,
                   {"benchmark": "ghz", "triplets": [list(map(int, t)) for t in triplets]})
