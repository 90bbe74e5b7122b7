"""Multilinear polynomials over binary variables (energy functions)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from noisyqpu.errors import RegisterTooLarge, ValidationError

EXHAUSTIVE_LIMIT = 24
CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class PuboPolynomial:
    """E(x) = sum_S c_S prod_{i in S} x_i with x_i in {0, 1}; S = () is the constant."""

    n: int
    terms: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        merged: dict[tuple[int, ...], float] = {}
        for s, c in self.terms.items():
            key = tuple(sorted(set(int(i) for i in s)))
            if any(i < 0 or i >= self.n for i in key):
                raise ValidationError(f"term {s} references a variable outside 0..{self.n - 1}")
            c = float(c)
            if not math.isfinite(c):
                raise ValidationError(f"non-finite coefficient for term {s}")
            merged[key] = merged.get(key, 0.0) + c
        clean = {k: v for k, v in sorted(merged.items(), key=lambda kv: (len(kv[0]), kv[0])) if v != 0.0}
        object.__setattr__(self, "terms", clean)

    # -- algebra ----------------------------------------------------------
    @classmethod
    def constant(cls, n: int, c: float) -> "PuboPolynomial":
        return cls(n, {(): c})

    @classmethod
    def variable(cls, n: int, i: int) -> "PuboPolynomial":
        return cls(n, {(i,): 1.0})

    def _coerce(self, other) -> "PuboPolynomial":
        if isinstance(other, PuboPolynomial):
            if other.n != self.n:
                raise ValidationError("polynomials over different variable counts")
            return other
        return PuboPolynomial.constant(self.n, float(other))

    def __add__(self, other):
        o = self._coerce(other)
        terms = dict(self.terms)
        for k, v in o.terms.items():
            terms[k] = terms.get(k, 0.0) + v
        return PuboPolynomial(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return PuboPolynomial(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, PuboPolynomial):
            return PuboPolynomial(self.n, {k: v * float(other) for k, v in self.terms.items()})
        o = self._coerce(other)
        terms: dict[tuple[int, ...], float] = {}
        for a, ca in self.terms.items():
            for b, cb in o.terms.items():
                key = tuple(sorted(set(a) | set(b)))  # x_i^2 = x_i
                terms[key] = terms.get(key, 0.0) + ca * cb
        return PuboPolynomial(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PuboPolynomial.constant(self.n, 1.0)
        for _ in range(k):
            out = out * self
        return out

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, x) -> float:
        return evaluate_energy(self, x)

    def energies(self, indices: np.ndarray) -> np.ndarray:
        """Energies of basis states given by integer indices (q0-lsb)."""
        idx = np.asarray(indices, dtype=np.int64)
        out = np.zeros(idx.shape, dtype=float)
        bits: dict[int, np.ndarray] = {}
        for s, c in self.terms.items():
            if not s:
                out += c
                continue
            prod = np.ones(idx.shape, dtype=bool)
            for i in s:
                if i not in bits:
                    bits[i] = ((idx >> i) & 1).astype(bool)
                prod &= bits[i]
            out += c * prod
        return out

    def iter_energies(self, chunk: int = CHUNK, limit: int = EXHAUSTIVE_LIMIT) -> Iterator[tuple[int, np.ndarray]]:
        """Stream (start index, energies) over all 2^n states without storing the table."""
        if self.n > limit:
            raise RegisterTooLarge(f"exhaustive enumeration of 2^{self.n} states exceeds the 2^{limit} cap")
        total = 1 << self.n
        for start in range(0, total, chunk):
            yield start, self.energies(np.arange(start, min(total, start + chunk), dtype=np.int64))

    # -- serialisation ----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "terms": [{"vars": list(k), "coeff": v} for k, v in self.terms.items()]}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "PuboPolynomial":
        try:
            n = int(d["n"])
            terms: dict[tuple[int, ...], float] = {}
            for i, t in enumerate(d["terms"]):
                key = tuple(sorted(int(v) for v in t["vars"]))
                if key in terms:
                    raise ValidationError(f"$.terms[{i}]: duplicate variable set {list(key)}")
                terms[key] = float(t["coeff"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed PUBO JSON ({exc})") from None
        return cls(n, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PuboPolynomial":
        return cls.from_dict(json.loads(text))


def _bits(x, n: int) -> list[int]:
    if isinstance(x, (int, np.integer)):
        return [(int(x) >> i) & 1 for i in range(n)]
    if isinstance(x, str):
        if set(x) - {"0", "1"}:
            raise ValidationError(f"bad bitstring {x!r}")
        if len(x) != n:
            raise ValidationError(f"bitstring of length {len(x)} for {n} variables")
        return [int(c) for c in reversed(x)]
    bits = [int(b) for b in x]
    if len(bits) != n:
        raise ValidationError(f"assignment of length {len(bits)} for {n} variables")
    return bits


def evaluate_energy(energy: PuboPolynomial, x) -> float:
    """E(x) for an index, a q0-lsb bitstring, or a sequence x[0], x[1], ..."""
    bits = _bits(x, energy.n)
    return float(sum(c for s, c in energy.terms.items() if all(bits[i] for i in s)))


@dataclass(frozen=True, eq=False)
class EnergySpectrum:
    """Distinct energy levels with their degeneracies, plus the lowest state."""

    n: int
    levels: np.ndarray
    degeneracy: np.ndarray
    ground_state: int

    @property
    def ground_energy(self) -> float:
        return float(self.levels[0])

    @property
    def ground_degeneracy(self) -> int:
        return int(self.degeneracy[0])

    @property
    def max_energy(self) -> float:
        return float(self.levels[-1])


def energy_spectrum(energy: PuboPolynomial, chunk: int = CHUNK, limit: int = EXHAUSTIVE_LIMIT,
                    decimals: int = 9) -> EnergySpectrum:
    """Density of states by exhaustive streaming enumeration.

    Energies are grouped after rounding to ``decimals`` places so that
    float noise from summation order does not split degenerate levels.
    """
    acc: dict[float, int] = {}
    best_e, best_i = math.inf, -1
    for start, e in energy.iter_energies(chunk, limit):
        r = np.round(e, decimals)
        k = int(np.argmin(r))
        if r[k] < best_e:
            best_e, best_i = float(r[k]), start + k
        vals, cnt = np.unique(r, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            acc[v] = acc.get(v, 0) + c
    levels = np.array(sorted(acc), dtype=float)
    deg = np.array([acc[v] for v in levels.tolist()], dtype=np.int64)
    return EnergySpectrum(energy.n, levels, deg, best_i)


def brute_force_minima(energy: PuboPolynomial, limit: int = EXHAUSTIVE_LIMIT) -> tuple[float, list[int]]:
    """Minimum energy and every index attaining it (rounded to 9 decimals)."""
    best, arg = math.inf, []
    for start, e in energy.iter_energies(limit=limit):
        r = np.round(e, 9)
        m = float(r.min())
        hits = (np.nonzero(r == m)[0] + start).tolist()
        if m < best:
            best, arg = m, hits
        elif m == best:
            arg.extend(hits)
    return best, arg


def from_terms(n: int, terms: Iterable[tuple[Sequence[int], float]]) -> PuboPolynomial:
    out: dict[tuple[int, ...], float] = {}
    for s, c in terms:
        key = tuple(sorted(s))
        out[key] = out.get(key, 0.0) + c
    return PuboPolynomial(n, out)
