"""Native-gate substitution and greedy nearest-neighbour routing.

Neither pass optimises: gates are rewritten one at a time and SWAPs are
inserted along a shortest path whenever a two-qubit gate is not on an edge.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Mapping, Sequence

import numpy as np

from noisyqpu.errors import DisconnectedTopology, UnknownDecomposition, ValidationError
from noisyqpu.qcore.circuit import NON_UNITARY, Circuit, Gate, Topology, gate_matrix

ALLOWED_NATIVE = frozenset({"rz", "sx", "x", "cz", "ecr", "measure", "delay", "barrier"})
PI = math.pi

# CX(c, t) around one ECR(c, t); sequences in time order, verified against
# the dense matrices in the test suite.
_ECR_PRE_C = (("sx", ()), ("rz", (-PI / 2,)))
_ECR_PRE_T = (("rz", (-PI / 2,)), ("sx", ()))
_ECR_POST_C = (("rz", (-PI / 2,)), ("sx", ()), ("rz", (PI / 2,)))
_ECR_POST_T = (("rz", (-PI / 2,)), ("sx", ()), ("rz", (PI / 2,)))


def normalize_gateset(gateset: Iterable[str]) -> frozenset[str]:
    gs = frozenset(g.lower() for g in gateset) | {"measure", "delay", "barrier"}
    bad = gs - ALLOWED_NATIVE
    if bad:
        raise ValidationError(f"unsupported native gates {sorted(bad)}; allowed {sorted(ALLOWED_NATIVE)}")
    return gs


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (theta, phi, lam) with u ~ RZ(phi) RY(theta) RZ(lam) up to phase."""
    v = u / np.sqrt(np.linalg.det(u))
    theta = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < 1e-12:
        # anti-diagonal: only phi - lam is defined
        phi, lam = 2 * np.angle(v[1, 0]), 0.0
    elif abs(v[1, 0]) < 1e-12:
        phi, lam = 2 * np.angle(v[1, 1]), 0.0
    else:
        s, d = 2 * np.angle(v[1, 1]), 2 * np.angle(v[1, 0])
        phi, lam = (s + d) / 2, (s - d) / 2
    return float(theta), float(phi), float(lam)


def _wrap(angle: float) -> float:
    a = math.remainder(angle, 4 * PI)
    return 0.0 if abs(a) < 1e-12 else a


def decompose_1q(u: np.ndarray, q: int, gateset: frozenset[str]) -> list[Gate]:
    """RZ/SX (and X when native) sequence for an arbitrary single-qubit unitary."""
    theta, phi, lam = zyz_angles(u)
    if abs(theta) < 1e-12:
        a = _wrap(phi + lam)
        return [Gate("rz", (q,), (a,))] if a else []
    if "x" in gateset and abs(theta - PI) < 1e-12:
        # RZ(phi) RY(pi) RZ(lam) ~ X RZ(lam - phi)
        a = _wrap(lam - phi)
        return ([Gate("rz", (q,), (a,))] if a else []) + [Gate("x", (q,))]
    seq = [(lam,), None, (theta + PI,), None, (phi + PI,)]
    out = []
    for p in seq:
        if p is None:
            out.append(Gate("sx", (q,)))
        else:
            a = _wrap(p[0])
            if a:
                out.append(Gate("rz", (q,), (a,)))
    return out


def _seq(q: int, items) -> list[Gate]:
    return [Gate(name, (q,), params) for name, params in items]


def _cx(c: int, t: int, gs: frozenset[str]) -> list[Gate]:
    if "ecr" in gs:
        return (_seq(c, _ECR_PRE_C) + _seq(t, _ECR_PRE_T) + [Gate("ecr", (c, t))]
                + _seq(c, _ECR_POST_C) + _seq(t, _ECR_POST_T))
    if "cz" in gs:
        h = _h(t)
        return h + [Gate("cz", (c, t))] + h
    raise UnknownDecomposition("cx needs cz or ecr in the native gateset")


def _h(q: int) -> list[Gate]:
    return [Gate("rz", (q,), (PI / 2,)), Gate("sx", (q,)), Gate("rz", (q,), (PI / 2,))]


def _ladder(qubits: Sequence[int]) -> list[Gate]:
    return [Gate("cx", (qubits[i], qubits[i + 1])) for i in range(len(qubits) - 1)]


def expand_gadget(g: Gate) -> list[Gate]:
    """CX-ladder form of a multi-qubit Z phase gadget (gates stay non-native)."""
    theta = g.params[0]
    qs = g.qubits
    if len(qs) == 1:
        return [Gate("rz", qs, (theta,))]
    ladder = _ladder(qs)
    return ladder + [Gate("rz", (qs[-1],), (theta,))] + ladder[::-1]


def _rewrite(g: Gate, gs: frozenset[str]) -> list[Gate]:
    """One rewriting step; the result may still contain non-native gates."""
    name, qs = g.name, g.qubits
    if name in gs or name in NON_UNITARY:
        return [g]
    if len(qs) == 1:
        if not {"rz", "sx"} <= gs:
            raise UnknownDecomposition(f"{name} needs rz and sx in the native gateset")
        if name == "h":
            return _h(qs[0])
        if name == "x":
            return [Gate("sx", qs), Gate("sx", qs)]
        if name == "rx":
            theta = g.params[0]
            return [Gate("rz", qs, (PI / 2,)), Gate("sx", qs), Gate("rz", qs, (_wrap(theta + PI),)),
                    Gate("sx", qs), Gate("rz", qs, (PI / 2,))]
        return decompose_1q(g.matrix(), qs[0], gs)
    if name == "cx":
        return _cx(qs[0], qs[1], gs)
    if name == "cz":
        a, b = qs
        return [Gate("h", (b,)), Gate("cx", (a, b)), Gate("h", (b,))]
    if name == "ecr":
        # ECR = post^-1 . CX . pre^-1 in the cx/ecr identity
        c, t = qs
        def inv(items):
            return np.linalg.inv(_product(items))

        return (decompose_1q(inv(_ECR_PRE_C), c, gs) + decompose_1q(inv(_ECR_PRE_T), t, gs)
                + [Gate("cx", (c, t))]
                + decompose_1q(inv(_ECR_POST_C), c, gs) + decompose_1q(inv(_ECR_POST_T), t, gs))
    if name == "swap":
        a, b = qs
        return [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
    if name == "rzz":
        a, b = qs
        return [Gate("cx", (a, b)), Gate("rz", (b,), g.params), Gate("cx", (a, b))]
    if name == "gadget":
        return expand_gadget(g)
    raise UnknownDecomposition(f"no decomposition rule for {name}")


def _product(items) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for name, params in items:
        m = gate_matrix(name, params) @ m
    return m


def substitute_gates(gates: Iterable[Gate], gateset: Iterable[str]) -> list[Gate]:
    gs = normalize_gateset(gateset)
    out: list[Gate] = []
    stack = list(reversed(list(gates)))
    guard = 0
    while stack:
        g = stack.pop()
        rewritten = _rewrite(g, gs)
        if rewritten == [g]:
            out.append(g)
            continue
        guard += 1
        if guard > 10_000_000:
            raise UnknownDecomposition("substitution did not terminate")
        stack.extend(reversed(rewritten))
    return out


def substitute_to_native(circuit: Circuit, gateset: Iterable[str]) -> Circuit:
    """Rewrite every non-native gate; native gates pass through untouched."""
    return circuit.with_instructions(substitute_gates(circuit.instructions, gateset))


def shortest_path(topology: Topology, a: int, b: int) -> list[int]:
    prev = {a: None}
    queue = deque([a])
    while queue:
        q = queue.popleft()
        if q == b:
            break
        for nb in topology.neighbors(q):
            if nb not in prev:
                prev[nb] = q
                queue.append(nb)
    if b not in prev:
        raise DisconnectedTopology(f"no path between physical qubits {a} and {b}")
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def route_nearest_neighbor(
    circuit: Circuit,
    topology: Topology,
    initial_layout: Mapping[int, int] | None = None,
    gateset: Iterable[str] | None = None,
) -> Circuit:
    """Map logical qubits onto ``topology``, inserting SWAPs where needed.

    The returned circuit acts on ``topology.num_qubits`` physical qubits.  Its
    metadata carries ``layout`` (initial logical->physical map),
    ``final_layout`` and ``measure_map`` (logical qubit -> physical qubit it
    was read from), so results can be reported in logical order.  Inserted
    SWAPs are expanded to CX, then into ``gateset`` if one is given.
    """
    n_log = circuit.num_qubits
    if n_log > topology.num_qubits:
        raise ValidationError(f"{n_log} logical qubits do not fit on {topology.num_qubits} physical qubits")
    layout = dict(initial_layout) if initial_layout is not None else {q: q for q in range(n_log)}
    if sorted(layout) != list(range(n_log)):
        raise ValidationError("initial layout must map every logical qubit")
    if len(set(layout.values())) != n_log or any(not 0 <= p < topology.num_qubits for p in layout.values()):
        raise ValidationError("initial layout must be injective onto physical qubits")
    initial = dict(layout)
    phys_to_log = {p: l for l, p in layout.items()}

    def swap(pa: int, pb: int) -> list[Gate]:
        la, lb = phys_to_log.get(pa), phys_to_log.get(pb)
        if la is not None:
            layout[la] = pb
        if lb is not None:
            layout[lb] = pa
        phys_to_log.pop(pa, None)
        phys_to_log.pop(pb, None)
        if la is not None:
            phys_to_log[pb] = la
        if lb is not None:
            phys_to_log[pa] = lb
        g = [Gate("swap", (pa, pb))]
        return substitute_gates(g, gateset) if gateset is not None else \
            [Gate("cx", (pa, pb)), Gate("cx", (pb, pa)), Gate("cx", (pa, pb))]

    pending: list[Gate] = []
    for g in circuit.instructions:
        if g.is_unitary and len(g.qubits) > 2:
            pending.extend(expand_gadget(g))
        else:
            pending.append(g)

    out: list[Gate] = []
    measure_map: dict[int, int] = {}
    for g in pending:
        if g.is_unitary and len(g.qubits) == 2:
            a, b = g.qubits
            pa, pb = layout[a], layout[b]
            if not topology.adjacent(pa, pb):
                path = shortest_path(topology, pa, pb)
                for i in range(len(path) - 2):
                    out.extend(swap(path[i], path[i + 1]))
            out.append(Gate(g.name, (layout[a], layout[b]), g.params))
        else:
            if g.name == "measure":
                measure_map[g.qubits[0]] = layout[g.qubits[0]]
            out.append(Gate(g.name, tuple(layout[q] for q in g.qubits), g.params))
    meta = {
        "layout": {str(k): v for k, v in initial.items()},
        "final_layout": {str(k): v for k, v in layout.items()},
        "measure_map": {str(k): v for k, v in sorted(measure_map.items())},
    }
    return Circuit(topology.num_qubits, tuple(out), {**circuit.metadata, **meta})


def measure_order(circuit: Circuit) -> list[int]:
    """Physical qubits in logical measurement order (bit k of an outcome)."""
    mm = circuit.metadata.get("measure_map")
    if mm:
        return [int(mm[k]) for k in sorted(mm, key=int)]
    return sorted(circuit.measured_qubits())
