"""Circuit intermediate representation and gate matrices.

Matrix convention: a gate acting on ``qubits = (q0, q1, ...)`` has a local
matrix whose basis index is ``sum(bit(q_k) << k)``, i.e. the first listed
qubit is the least-significant bit.  The same q0-lsb rule applies to full
registers and to every bitstring emitted by the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from noisyqpu.errors import ValidationError

# name -> (arity, number of params); arity None means "any >= 1"
GATE_SPECS: dict[str, tuple[int | None, int]] = {
    "id": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "sx": (1, 0),
    "h": (1, 0),
    "rz": (1, 1),
    "rx": (1, 1),
    "ry": (1, 1),
    "cx": (2, 0),
    "cz": (2, 0),
    "ecr": (2, 0),
    "swap": (2, 0),
    "rzz": (2, 1),
    "gadget": (None, 1),
    "delay": (1, 1),
    "measure": (1, 0),
    "barrier": (None, 0),
}

NON_UNITARY = frozenset({"delay", "measure", "barrier"})


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "name", self.name.lower())
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        spec = GATE_SPECS.get(self.name)
        if spec is None:
            raise ValidationError(f"unknown gate {self.name!r}")
        arity, nparams = spec
        if arity is not None and len(self.qubits) != arity:
            raise ValidationError(f"{self.name} acts on {arity} qubit(s), got {self.qubits}")
        if not self.qubits:
            raise ValidationError(f"{self.name} needs at least one qubit")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"repeated qubit in {self.name}{self.qubits}")
        if len(self.params) != nparams:
            raise ValidationError(f"{self.name} takes {nparams} parameter(s), got {self.params}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValidationError(f"non-finite parameter in {self.name}")
        if self.name == "delay" and self.params[0] < 0:
            raise ValidationError("delay must be non-negative")

    @property
    def is_unitary(self) -> bool:
        return self.name not in NON_UNITARY

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.name, self.params, len(self.qubits))

    def to_dict(self) -> dict[str, Any]:
        return {"gate": self.name, "qubits": list(self.qubits), "params": list(self.params)}


# Convenience constructors.
def X(q): return Gate("x", (q,))
def SX(q): return Gate("sx", (q,))
def H(q): return Gate("h", (q,))
def RZ(theta, q): return Gate("rz", (q,), (theta,))
def RX(theta, q): return Gate("rx", (q,), (theta,))
def CX(c, t): return Gate("cx", (c, t))
def CZ(a, b): return Gate("cz", (a, b))
def ECR(c, t): return Gate("ecr", (c, t))
def RZZ(theta, a, b): return Gate("rzz", (a, b), (theta,))
def Gadget(theta, qubits): return Gate("gadget", tuple(qubits), (theta,))
def Delay(t, q): return Gate("delay", (q,), (t,))
def Measure(q): return Gate("measure", (q,))
def Barrier(qubits): return Gate("barrier", tuple(qubits))


_I2 = np.eye(2, dtype=complex)
_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (_I2, _PX, _PY, _PZ)


def _two(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Local 4x4 operator with ``a`` on the first (lsb) qubit, ``b`` on the second."""
    return np.kron(b, a)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def gate_matrix(name: str, params: Sequence[float] = (), nqubits: int = 1) -> np.ndarray:
    if name == "id":
        return _I2.copy()
    if name == "x":
        return _PX.copy()
    if name == "y":
        return _PY.copy()
    if name == "z":
        return _PZ.copy()
    if name == "sx":
        return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
    if name == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if name == "rz":
        return rz_matrix(params[0])
    if name == "rx":
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if name == "ry":
        c, s = math.cos(params[0] / 2), math.sin(params[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "cx":
        return _two(np.diag([1, 0]), _I2) + _two(np.diag([0, 1]), _PX)
    if name == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if name == "ecr":
        # (IX - XY)/sqrt(2) with the first Pauli on the control
        return (_two(_I2, _PX) - _two(_PX, _PY)) / math.sqrt(2)
    if name == "swap":
        m = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            m[((i & 1) << 1) | (i >> 1), i] = 1
        return m
    if name in ("rzz", "gadget"):
        k = 2 if name == "rzz" else nqubits
        idx = np.arange(1 << k)
        parity = np.zeros(1 << k, dtype=int)
        for j in range(k):
            parity ^= (idx >> j) & 1
        z = 1 - 2 * parity
        return np.diag(np.exp(-0.5j * params[0] * z))
    raise ValidationError(f"gate {name!r} has no unitary matrix")


@dataclass(frozen=True)
class Topology:
    num_qubits: int
    edges: frozenset[frozenset[int]]

    def __post_init__(self):
        edges = frozenset(frozenset(int(q) for q in e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ValidationError(f"invalid edge {sorted(e)} (self-loop or malformed)")
            if any(q < 0 or q >= self.num_qubits for q in e):
                raise ValidationError(f"edge {sorted(e)} references a qubit outside 0..{self.num_qubits - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, num_qubits: int, pairs: Iterable[Sequence[int]]) -> "Topology":
        return cls(num_qubits, frozenset(frozenset(p) for p in pairs))

    @classmethod
    def line(cls, n: int) -> "Topology":
        return cls.from_pairs(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def ring(cls, n: int) -> "Topology":
        pairs = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(i, i + 1) for i in range(n - 1)]
        return cls.from_pairs(n, pairs)

    @classmethod
    def full(cls, n: int) -> "Topology":
        return cls.from_pairs(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    def adjacent(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges

    def neighbors(self, q: int) -> list[int]:
        return sorted(next(iter(e - {q})) for e in self.edges if q in e)

    def pairs(self) -> list[list[int]]:
        return sorted(sorted(e) for e in self.edges)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple[Gate, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "metadata", dict(self.metadata))
        if self.num_qubits < 0:
            raise ValidationError("num_qubits must be non-negative")
        measured: set[int] = set()
        for g in self.instructions:
            for q in g.qubits:
                if q < 0 or q >= self.num_qubits:
                    raise ValidationError(f"{g.name} on qubit {q} outside 0..{self.num_qubits - 1}")
            if g.name == "measure":
                if g.qubits[0] in measured:
                    raise ValidationError(f"qubit {g.qubits[0]} measured twice")
                measured.add(g.qubits[0])
            elif g.name != "barrier" and measured.intersection(g.qubits):
                raise ValidationError(f"{g.name} after measurement on {sorted(measured.intersection(g.qubits))}")

    def measured_qubits(self) -> list[int]:
        return [g.qubits[0] for g in self.instructions if g.name == "measure"]

    def with_instructions(self, instructions: Iterable[Gate], **meta) -> "Circuit":
        return Circuit(self.num_qubits, tuple(instructions), {**self.metadata, **meta})

    # -- statistics -------------------------------------------------------
    def two_qubit_gate_count(self) -> int:
        return sum(1 for g in self.instructions if g.is_unitary and len(g.qubits) == 2)

    def depth(self) -> int:
        """Number of gate layers; delays, barriers and measurements are not counted."""
        level = [0] * self.num_qubits
        for g in self.instructions:
            if g.name in NON_UNITARY:
                if g.name == "barrier":
                    m = max(level[q] for q in g.qubits)
                    for q in g.qubits:
                        level[q] = m
                continue
            m = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = m
        return max(level, default=0)

    def stats(self) -> dict[str, int]:
        return {
            "num_qubits": self.num_qubits,
            "two_qubit_gates": self.two_qubit_gate_count(),
            "depth": self.depth(),
            "instructions": len(self.instructions),
        }

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "num_qubits": self.num_qubits,
            "instructions": [g.to_dict() for g in self.instructions],
        }
        if self.metadata:
            d["metadata"] = self.metadata
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Circuit":
        try:
            n = int(d["num_qubits"])
            instrs = []
            for i, item in enumerate(d["instructions"]):
                try:
                    instrs.append(Gate(item["gate"], tuple(item["qubits"]), tuple(item.get("params", ()))))
                except (KeyError, TypeError) as exc:
                    raise ValidationError(f"$.instructions[{i}]: malformed ({exc})") from None
                except ValidationError as exc:
                    raise ValidationError(f"$.instructions[{i}]: {exc}") from None
        except KeyError as exc:
            raise ValidationError(f"$: missing key {exc}") from None
        return cls(n, tuple(instrs), d.get("metadata", {}))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def embed(matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n x 2^n matrix of a local operator, built by explicit index mapping."""
    k = len(qubits)
    if matrix.shape != (1 << k, 1 << k):
        raise ValidationError(f"matrix shape {matrix.shape} does not match {k} qubit(s)")
    dim = 1 << n
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=int)
    for j, q in enumerate(qubits):
        local |= ((idx >> q) & 1) << j
    rest = idx.copy()
    for q in qubits:
        rest &= ~(1 << q)
    out = np.zeros((dim, dim), dtype=complex)
    # same "rest" bits are required for a non-zero element
    same = rest[:, None] == rest[None, :]
    out[same] = matrix[local[:, None], local[None, :]][same]
    return out


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the unitary part of a circuit (test oracle, small n only)."""
    n = circuit.num_qubits
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.instructions:
        if g.is_unitary:
            u = embed(g.matrix(), g.qubits, n) @ u
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-10) -> bool:
    k = int(np.argmax(np.abs(b)))
    bk = b.flat[k]
    if abs(bk) < 1e-12:
        return bool(np.allclose(a, b, atol=atol))
    phase = a.flat[k] / bk
    if abs(abs(phase) - 1) > atol:
        return False
    return bool(np.max(np.abs(a - phase * b)) <= atol)
