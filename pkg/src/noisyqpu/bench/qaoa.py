"""Linear-ramp QAOA circuits for arbitrary binary energy polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from noisyqpu.bench.pubo import PuboPolynomial
from noisyqpu.errors import InvalidParameter
from noisyqpu.qcore.circuit import RX, Circuit, Gadget, Gate, H, Measure


@dataclass(frozen=True)
class LrSchedule:
    p: int
    delta_beta: float = 0.5
    delta_gamma: float = 0.5

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise InvalidParameter(f"layer count must be a positive integer, got {self.p}")
        for name in ("delta_beta", "delta_gamma"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise InvalidParameter(f"{name} must lie in [0, 1], got {v}")

    def betas(self) -> list[float]:
        return [((j - 1) / self.p - 1) * self.delta_beta for j in range(1, self.p + 1)]

    def gammas(self) -> list[float]:
        return [j / self.p * self.delta_gamma for j in range(1, self.p + 1)]


def spin_hamiltonian(energy: PuboPolynomial) -> dict[tuple[int, ...], float]:
    """Z-string coefficients of E under x = (1 - z)/2, constant term dropped."""
    h: dict[tuple[int, ...], float] = {}
    for s, c in energy.terms.items():
        w = c / (1 << len(s))
        for k in range(1, len(s) + 1):
            for sub in combinations(s, k):
                h[sub] = h.get(sub, 0.0) + w * (-1) ** k
    return {k: v for k, v in sorted(h.items(), key=lambda kv: (len(kv[0]), kv[0])) if abs(v) > 1e-14}


def cost_block(energy: PuboPolynomial, gamma: float) -> list[Gate]:
    """Gates for exp(-i gamma H_C): one phase gadget per Z-string."""
    return [Gadget(2 * gamma * c, qs) for qs, c in spin_hamiltonian(energy).items()]


def mixer_block(n: int, beta: float) -> list[Gate]:
    return [RX(2 * beta, q) for q in range(n)]


def lr_qaoa_circuit(energy: PuboPolynomial, schedule: LrSchedule) -> Circuit:
    n = energy.n
    if n < 1:
        raise InvalidParameter("energy must have at least one variable")
    gates: list[Gate] = [H(q) for q in range(n)]
    for beta, gamma in zip(schedule.betas(), schedule.gammas()):
        gates += cost_block(energy, gamma)
        gates += mixer_block(n, beta)
    gates += [Measure(q) for q in range(n)]
    meta = {"benchmark": "lr-qaoa", "p": schedule.p,
            "delta_beta": schedule.delta_beta, "delta_gamma": schedule.delta_gamma}
    return Circuit(n, gates, meta)
