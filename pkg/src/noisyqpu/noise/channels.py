"""Kraus channels built from calibration parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from noisyqpu.errors import InvalidParameter
from noisyqpu.qcore.circuit import PAULIS

PHENOMENOLOGICAL = "phenomenological"
LITERAL = "literal"


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        if not ops:
            raise InvalidParameter("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if d not in (2, 4) or any(k.shape != (d, d) for k in ops):
            raise InvalidParameter("Kraus operators must all be 2x2 or all 4x4")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def arity(self) -> int:
        return 1 if self.dim == 2 else 2

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ k.conj().T for k in self.operators)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Channel applying ``self`` first and ``other`` second."""
        ops = [b @ a for a in self.operators for b in other.operators]
        return KrausChannel(tuple(k for k in ops if np.any(np.abs(k) > 0)) or (ops[0],))

    @cached_property
    def superoperator(self) -> np.ndarray:
        """Matrix S with vec(K rho K^dag) = S vec(rho) for row-major vec."""
        return sum(np.kron(k, k.conj()) for k in self.operators)

    def is_identity(self, atol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.superoperator - np.eye(self.dim ** 2))) <= atol)


def _time_checks(t: float) -> None:
    if not (t >= 0 and math.isfinite(t)):
        raise InvalidParameter(f"duration must be finite and non-negative, got {t}")


def amplitude_damping_channel(t1: float, t: float) -> KrausChannel:
    if not t1 > 0:
        raise InvalidParameter(f"T1 must be positive, got {t1}")
    _time_checks(t)
    decay = math.exp(-t / t1)
    e0 = np.array([[1, 0], [0, math.sqrt(decay)]], dtype=complex)
    e1 = np.array([[0, math.sqrt(-math.expm1(-t / t1))], [0, 0]], dtype=complex)
    return KrausChannel((e0, e1))


def pure_dephasing_rate(t1: float, t2: float, convention: str = PHENOMENOLOGICAL) -> float:
    """1/T_phi.

    The phenomenological convention (default) picks T_phi so that dephasing
    after amplitude damping decays coherences exactly as exp(-t/T2); the
    literal convention uses 1/T2 - 1/T1.
    """
    if not (t1 > 0 and t2 > 0):
        raise InvalidParameter("T1 and T2 must be positive")
    if convention == PHENOMENOLOGICAL:
        rate = 1 / t2 - 1 / (2 * t1)
    elif convention == LITERAL:
        rate = 1 / t2 - 1 / t1
    else:
        raise InvalidParameter(f"unknown T_phi convention {convention!r}")
    if rate < -1e-12 * (1 / t2):
        limit = "2*T1" if convention == PHENOMENOLOGICAL else "T1"
        raise InvalidParameter(f"T2={t2} exceeds {limit} (T1={t1}); pure dephasing time undefined")
    return max(rate, 0.0)


def dephasing_channel(t1: float, t2: float, t: float, convention: str = PHENOMENOLOGICAL) -> KrausChannel:
    _time_checks(t)
    rate = pure_dephasing_rate(t1, t2, convention)
    # keep both amplitudes accurate when nearly all coherence is gone
    e0 = np.array([[1, 0], [0, math.exp(-t * rate)]], dtype=complex)
    e1 = np.array([[0, 0], [0, math.sqrt(-math.expm1(-2 * t * rate))]], dtype=complex)
    return KrausChannel((e0, e1))


def decoherence_channel(t1: float, t2: float, t: float, convention: str = PHENOMENOLOGICAL) -> KrausChannel:
    """Amplitude damping followed by pure dephasing over an idle time ``t``."""
    return amplitude_damping_channel(t1, t).then(dephasing_channel(t1, t2, t, convention))


def depolarizing_probability(fidelity: float, arity: int) -> float:
    """Per-qubit Pauli weight p matching the reported average gate fidelity."""
    if not 0 < fidelity <= 1:
        raise InvalidParameter(f"fidelity must lie in (0, 1], got {fidelity}")
    if arity == 1:
        p = 1.5 * (1 - fidelity)
    elif arity == 2:
        arg = (5 * fidelity - 1) / 4
        if arg < 0:
            raise InvalidParameter(f"two-qubit fidelity {fidelity} is below the channel's range")
        p = 1 - math.sqrt(arg)
    else:
        raise InvalidParameter("arity must be 1 or 2")
    if p > 0.75 + 1e-15:
        raise InvalidParameter(f"fidelity {fidelity} implies p={p:.4f} > 3/4")
    return max(p, 0.0)


def single_qubit_depolarizing(p: float) -> KrausChannel:
    if not 0 <= p <= 0.75:
        raise InvalidParameter(f"depolarizing p={p} outside [0, 3/4]")
    ops = [math.sqrt(1 - p) * PAULIS[0]] + [math.sqrt(p / 3) * s for s in PAULIS[1:]]
    return KrausChannel(tuple(ops))


def depolarizing_channel(fidelity: float, arity: int = 1) -> KrausChannel:
    p = depolarizing_probability(fidelity, arity)
    single = single_qubit_depolarizing(p)
    if arity == 1:
        return single
    # first qubit is the low bit of the local index, hence kron(second, first)
    ops = tuple(np.kron(kj, ki) for ki in single.operators for kj in single.operators)
    return KrausChannel(ops)


def average_gate_fidelity(channel: KrausChannel) -> float:
    """Average fidelity to the identity, via the process fidelity."""
    d = channel.dim
    f_pro = sum(abs(np.trace(k)) ** 2 for k in channel.operators) / d ** 2
    return float((d * f_pro + 1) / (d + 1))


def measurement_error_confusion(e0: float, e1: float) -> np.ndarray:
    """Column-stochastic matrix mapping true outcome probabilities to read ones."""
    for e in (e0, e1):
        if not 0 <= e <= 1:
            raise InvalidParameter(f"readout error {e} outside [0, 1]")
    return np.array([[1 - e0, e1], [e0, 1 - e1]], dtype=float)


def init_error_state(e1: float) -> np.ndarray:
    """Prepared single-qubit state: |1> with probability ``e1``, else |0>."""
    if not 0 <= e1 <= 1:
        raise InvalidParameter(f"init error {e1} outside [0, 1]")
    return np.diag([1 - e1, e1]).astype(complex)


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),))


def unitary_mixture(channel: KrausChannel, atol: float = 1e-12) -> tuple[np.ndarray, list[np.ndarray]] | None:
    """(probabilities, unitaries) if every Kraus operator is a scaled unitary."""
    probs, unitaries = [], []
    eye = np.eye(channel.dim)
    for k in channel.operators:
        kk = k.conj().T @ k
        c = float(np.real(kk[0, 0]))
        if np.max(np.abs(kk - c * eye)) > atol:
            return None
        if c > 0:
            probs.append(c)
            unitaries.append(k / math.sqrt(c))
    return np.asarray(probs), unitaries


def compose(channels: Sequence[KrausChannel]) -> KrausChannel:
    out = channels[0]
    for ch in channels[1:]:
        out = out.then(ch)
    return out
