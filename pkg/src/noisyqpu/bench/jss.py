"""Job-shop scheduling (load balancing) instances and their binary encodings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from noisyqpu.bench.pubo import PuboPolynomial
from noisyqpu.errors import ValidationError


@dataclass(frozen=True)
class JssInstance:
    durations: tuple[float, ...]
    machines: int = 2

    def __post_init__(self):
        object.__setattr__(self, "durations", tuple(float(t) for t in self.durations))
        if not self.durations:
            raise ValidationError("need at least one job")
        if self.machines < 2:
            raise ValidationError("need at least two machines")
        if any(not t > 0 for t in self.durations):
            raise ValidationError("job durations must be positive")

    @property
    def jobs(self) -> int:
        return len(self.durations)

    @property
    def mean_load(self) -> float:
        return sum(self.durations) / self.machines

    def default_penalty(self) -> float:
        return 2 * sum(self.durations) ** 2 / self.machines

    def register_bits(self) -> int:
        return math.ceil(math.log2(self.machines))

    def to_dict(self) -> dict[str, Any]:
        return {"durations": list(self.durations), "machines": self.machines}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "JssInstance":
        try:
            return cls(tuple(d["durations"]), int(d.get("machines", 2)))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed JSS instance JSON ({exc})") from None

    @classmethod
    def from_json(cls, text: str) -> "JssInstance":
        return cls.from_dict(json.loads(text))

    @classmethod
    def random(cls, jobs: int, machines: int = 2, seed: int = 0, low: int = 1, high: int = 4) -> "JssInstance":
        rng = np.random.default_rng(seed)
        return cls(tuple(int(t) for t in rng.integers(low, high + 1, size=jobs)), machines)


def jss_onehot_pubo(instance: JssInstance, penalty: float | None = None) -> PuboPolynomial:
    """Variable j*n_m + m is 1 when job j runs on machine m."""
    lam = instance.default_penalty() if penalty is None else float(penalty)
    if not lam > 0:
        raise ValidationError("penalty must be positive")
    nm, nj = instance.machines, instance.jobs
    n = nj * nm
    x = lambda j, m: PuboPolynomial.variable(n, j * nm + m)  # noqa: E731
    energy = PuboPolynomial.constant(n, 0.0)
    for m in range(nm):
        load = sum((t * x(j, m) for j, t in enumerate(instance.durations)), PuboPolynomial.constant(n, 0.0))
        energy = energy + (load - instance.mean_load) ** 2
    for j in range(nj):
        assigned = sum((x(j, m) for m in range(nm)), PuboPolynomial.constant(n, 0.0))
        energy = energy + lam * (assigned - 1) ** 2
    return energy


def machine_indicator(n: int, first_var: int, bits: int, machines: int, m: int) -> PuboPolynomial:
    """1 when the register starting at ``first_var`` encodes machine ``m``.

    Register values at or above ``machines`` wrap onto ``value % machines``.
    """
    out = PuboPolynomial.constant(n, 0.0)
    for value in range(1 << bits):
        if value % machines != m:
            continue
        sel = PuboPolynomial.constant(n, 1.0)
        for k in range(bits):
            xk = PuboPolynomial.variable(n, first_var + k)
            sel = sel * (xk if (value >> k) & 1 else 1 - xk)
        out = out + sel
    return out


def jss_dense_pubo(instance: JssInstance) -> PuboPolynomial:
    """Binary machine register of ceil(log2 n_m) bits per job (variables j*b .. j*b+b-1)."""
    b = instance.register_bits()
    n = instance.jobs * b
    energy = PuboPolynomial.constant(n, 0.0)
    for m in range(instance.machines):
        load = PuboPolynomial.constant(n, 0.0)
        for j, t in enumerate(instance.durations):
            load = load + t * machine_indicator(n, j * b, b, instance.machines, m)
        energy = energy + (load - instance.mean_load) ** 2
    return energy


def onehot_assignment(index: int, instance: JssInstance) -> tuple[int, ...] | None:
    """Machine per job for a one-hot state, or None if some job is not assigned exactly once."""
    nm = instance.machines
    out = []
    for j in range(instance.jobs):
        ms = [m for m in range(nm) if (index >> (j * nm + m)) & 1]
        if len(ms) != 1:
            return None
        out.append(ms[0])
    return tuple(out)


def dense_assignment(index: int, instance: JssInstance) -> tuple[int, ...]:
    b = instance.register_bits()
    return tuple(((index >> (j * b)) & ((1 << b) - 1)) % instance.machines for j in range(instance.jobs))


def partition(assignment: Sequence[int], machines: int) -> frozenset[frozenset[int]]:
    """Unlabelled machine partition of the jobs (machines are interchangeable)."""
    groups = [frozenset(j for j, m in enumerate(assignment) if m == k) for k in range(machines)]
    return frozenset(groups)
