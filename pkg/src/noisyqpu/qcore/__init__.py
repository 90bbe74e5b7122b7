"""Circuit IR, native-gate substitution, routing and scheduling."""

from noisyqpu.qcore.circuit import (
    Barrier, CX, CZ, Circuit, Delay, ECR, Gadget, Gate, H, Measure, RX, RZ, RZZ, SX, Topology, X,
    circuit_unitary, embed, equal_up_to_phase, gate_matrix,
)
from noisyqpu.qcore.schedule import Interval, Schedule, schedule_asap
from noisyqpu.qcore.transpile import (
    measure_order, route_nearest_neighbor, substitute_gates, substitute_to_native,
)

__all__ = [
    "Barrier", "CX", "CZ", "Circuit", "Delay", "ECR", "Gadget", "Gate", "H", "Measure", "RX", "RZ",
    "RZZ", "SX", "Topology", "X", "circuit_unitary", "embed", "equal_up_to_phase", "gate_matrix",
    "Interval", "Schedule", "schedule_asap", "measure_order", "route_nearest_neighbor",
    "substitute_gates", "substitute_to_native",
]
