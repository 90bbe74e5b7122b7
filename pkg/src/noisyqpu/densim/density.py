"""Exact density-matrix evolution and outcome distributions.

States are kept as tensors of shape ``(2,) * 2n``.  Row axis ``a`` holds
qubit ``n - 1 - a`` (and column axis ``n + a`` likewise), which makes the
flattened index q0-lsb.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from noisyqpu.errors import NumericalBreakdown, RegisterTooLarge, ValidationError
from noisyqpu.noise.model import NoisyProgram

DENSITY_LIMIT = 12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n: int
    data: np.ndarray  # (2^n, 2^n)

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))

    def probabilities(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.data)), 0.0, None)


def apply_superoperator(rho: np.ndarray, superop: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a k-qubit superoperator (d^2 x d^2, row-major vec) to a rank-2n tensor."""
    k = len(qubits)
    s = superop.reshape((2,) * (4 * k))
    rows = [n - 1 - q for q in reversed(qubits)]
    cols = [2 * n - 1 - q for q in reversed(qubits)]
    target = rows + cols
    out = np.tensordot(s, rho, axes=(list(range(2 * k, 4 * k)), target))
    return np.moveaxis(out, list(range(2 * k)), target)


def initial_density(program: NoisyProgram) -> np.ndarray:
    n = program.num_qubits
    rho = np.ones((1, 1), dtype=complex)
    # kron with the highest qubit first keeps q0 as the least-significant bit
    for s in reversed(program.init_states):
        rho = np.kron(rho, s)
    return rho.reshape((2,) * (2 * n)) if n else rho


def evolve_density(program: NoisyProgram, initial: np.ndarray | None = None,
                   limit: int = DENSITY_LIMIT) -> DensityMatrix:
    n = program.num_qubits
    if n > limit:
        raise RegisterTooLarge(f"{n} qubits exceed the density-matrix limit of {limit}; use trajectories")
    if initial is None:
        rho = initial_density(program)
    else:
        rho = np.asarray(initial, dtype=complex).reshape((2,) * (2 * n)) if n else np.asarray(initial, complex)
    for op in program.operations:
        rho = apply_superoperator(rho, op.channel.superoperator, op.qubits, n)
    dim = 1 << n
    mat = np.ascontiguousarray(rho).reshape(dim, dim)
    tr = np.real(np.trace(mat))
    if abs(tr - 1) > 1e-8:
        raise NumericalBreakdown(f"trace drifted to {tr}")
    return DensityMatrix(n, mat)


def marginal(probs: np.ndarray, n: int, measured: tuple[int, ...]) -> np.ndarray:
    """Marginal over ``measured`` qubits; bit k of the result index is measured[k]."""
    if len(set(measured)) != len(measured):
        raise ValidationError("measured qubits must be distinct")
    m = len(measured)
    t = probs.reshape((2,) * n) if n else probs.reshape(())
    keep = [n - 1 - q for q in reversed(measured)]
    rest = [a for a in range(n) if a not in keep]
    t = np.transpose(t, keep + rest)
    if rest:
        t = t.sum(axis=tuple(range(m, n)))
    return np.ascontiguousarray(t).reshape(1 << m)


def apply_confusion(dist: np.ndarray, confusion: tuple[np.ndarray, ...]) -> np.ndarray:
    m = len(confusion)
    t = dist.reshape((2,) * m) if m else dist
    for k, c in enumerate(confusion):
        if np.array_equal(c, np.eye(2)):
            continue
        axis = m - 1 - k
        t = np.moveaxis(np.tensordot(c, t, axes=([1], [axis])), 0, axis)
    return np.ascontiguousarray(t).reshape(1 << m)


def measurement_distribution(rho: DensityMatrix, measured: tuple[int, ...],
                             confusion: tuple[np.ndarray, ...] | None = None) -> np.ndarray:
    p = marginal(rho.probabilities(), rho.n, tuple(measured))
    if confusion is not None:
        p = apply_confusion(p, tuple(confusion))
    total = p.sum()
    return p / total if total > 0 else p


def exact_distribution(program: NoisyProgram, limit: int = DENSITY_LIMIT) -> np.ndarray:
    rho = evolve_density(program, limit=limit)
    return measurement_distribution(rho, program.measured, program.confusion)
