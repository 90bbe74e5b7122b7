"""Builders shared by several test modules."""

import numpy as np

from noisyqpu.noise import synthetic_snapshot
from noisyqpu.pipeline import compile_circuit
from noisyqpu.qcore import CX, RX, RZ, Circuit, H, Measure, SX, X

GATES_1Q = ("h", "x", "sx", "rz", "rx")


def random_circuit(n: int, gates: int, rng: np.random.Generator, measure: bool = True) -> Circuit:
    out = []
    for _ in range(gates):
        if n > 1 and rng.random() < 0.35:
            a, b = rng.choice(n, size=2, replace=False)
            out.append(CX(int(a), int(b)))
            continue
        q = int(rng.integers(n))
        kind = GATES_1Q[rng.integers(len(GATES_1Q))]
        th = float(rng.uniform(-np.pi, np.pi))
        out.append({"h": H(q), "x": X(q), "sx": SX(q), "rz": RZ(th, q), "rx": RX(th, q)}[kind])
    if measure:
        out += [Measure(q) for q in range(n)]
    return Circuit(n, out)


def noisy_snapshot(n: int, seed: int = 0):
    """Error rates well above hardware values so noise effects are easy to see."""
    return synthetic_snapshot(n, t1=2e-6, t2=2.5e-6, fidelity_1q=0.995, fidelity_2q=0.95, readout=0.03,
                              init_e1=0.02, spread=0.3, seed=seed)


def random_program(n: int, seed: int, gates: int = 12):
    rng = np.random.default_rng(seed)
    return compile_circuit(random_circuit(n, gates, rng), noisy_snapshot(n, seed)).program
