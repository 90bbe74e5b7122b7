"""Maximum-likelihood fits of exponential-in-energy output distributions.

Model: p(x) = (exp(-zeta E(x)) + delta) / Z with delta >= 0 (delta = 0 is
the pure model).  Everything is evaluated in the log domain over the density
of states of E, so no 2^n table is kept and exp(-zeta E) never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.special import gammaln, logsumexp

from noisyqpu.bench.pubo import EXHAUSTIVE_LIMIT, EnergySpectrum, PuboPolynomial, energy_spectrum
from noisyqpu.densim.counts import CountsHistogram
from noisyqpu.errors import (
    DegenerateSpectrum, DenominatorNonpositive, NonConvergence, OutOfRange, ValidationError,
)

LIKELIHOOD_RATIO = 0.60
JITTER_SEED = 20240601
RESTARTS = 4
LN2 = math.log(2.0)


class LikelihoodInterval(NamedTuple):
    lo: float
    hi: float

    @property
    def unbounded(self) -> bool:
        return not (math.isfinite(self.lo) and math.isfinite(self.hi))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class Observations:
    energies: np.ndarray
    counts: np.ndarray

    @property
    def shots(self) -> float:
        return float(self.counts.sum())

    @property
    def log_multinomial(self) -> float:
        return float(gammaln(self.shots + 1) - gammaln(self.counts + 1).sum())

    def mean_energy(self) -> float:
        return float(self.counts @ self.energies / self.shots)


def observations(energy: PuboPolynomial, counts, decimals: int = 9) -> Observations:
    """Observed energies with their counts; accepts histograms, maps or dense vectors."""
    if isinstance(counts, CountsHistogram):
        if counts.n != energy.n:
            raise ValidationError(f"counts over {counts.n} bits but energy over {energy.n} variables")
        idx, c = counts.indices()
    elif isinstance(counts, Mapping):
        return observations(energy, CountsHistogram(energy.n, dict(counts)), decimals)
    else:
        vec = np.asarray(counts, dtype=float)
        if vec.shape != (1 << energy.n,):
            raise ValidationError(f"count vector of shape {vec.shape} for {energy.n} variables")
        idx = np.nonzero(vec)[0]
        c = vec[idx]
    if np.any(c < 0) or c.sum() <= 0:
        raise ValidationError("counts must be non-negative and not all zero")
    return Observations(np.round(energy.energies(idx), decimals), np.asarray(c, dtype=float))


# -- model primitives -----------------------------------------------------
def log_z0(spec: EnergySpectrum, zeta: float) -> float:
    return float(logsumexp(-zeta * spec.levels, b=spec.degeneracy))


def log_partition(spec: EnergySpectrum, zeta: float, delta: float = 0.0) -> float:
    lz = log_z0(spec, zeta)
    if delta <= 0:
        return lz
    return float(np.logaddexp(lz, spec.n * LN2 + math.log(delta)))


def log_weight(energies: np.ndarray, zeta: float, delta: float = 0.0) -> np.ndarray:
    if delta <= 0:
        return -zeta * energies
    return np.logaddexp(-zeta * energies, math.log(delta))


def _kernel(spec: EnergySpectrum, obs: Observations, zeta: float, delta: float = 0.0) -> float:
    lw = log_weight(obs.energies, zeta, delta)
    return float(obs.counts @ lw - obs.shots * log_partition(spec, zeta, delta))


def log_likelihood(spec: EnergySpectrum, obs: Observations, zeta: float, delta: float = 0.0) -> float:
    """Multinomial log-likelihood including the combinatorial constant."""
    return _kernel(spec, obs, zeta, delta) + obs.log_multinomial


def spectrum_mean(spec: EnergySpectrum, zeta: float) -> float:
    lw = np.log(spec.degeneracy) - zeta * spec.levels
    w = np.exp(lw - lw.max())
    return float(w @ spec.levels / w.sum())


def spectrum_variance(spec: EnergySpectrum, zeta: float) -> float:
    lw = np.log(spec.degeneracy) - zeta * spec.levels
    w = np.exp(lw - lw.max())
    w /= w.sum()
    m = w @ spec.levels
    return float(w @ (spec.levels - m) ** 2)


def mean_energy_at_zeta(energy: PuboPolynomial | EnergySpectrum, zeta: float,
                        limit: int = EXHAUSTIVE_LIMIT) -> float:
    """Boltzmann-weighted mean energy over all 2^n states."""
    if not math.isfinite(zeta):
        raise ValidationError("zeta must be finite")
    spec = energy if isinstance(energy, EnergySpectrum) else energy_spectrum(energy, limit=limit)
    return spectrum_mean(spec, zeta)


def boltzmann_distribution(energy: PuboPolynomial, zeta: float, delta: float = 0.0) -> np.ndarray:
    """Dense model probabilities over all 2^n states (q0-lsb)."""
    e = energy.energies(np.arange(1 << energy.n))
    lw = log_weight(e, zeta, delta)
    return np.exp(lw - logsumexp(lw))


def _zeta_cap(spec: EnergySpectrum) -> float:
    gaps = np.diff(spec.levels)
    return 1e3 / float(gaps.min())


# -- results --------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class FitResult:
    model: str
    zeta: float
    delta: float | None
    log_likelihood: float
    log_z: float
    p_tilde: float
    shots: float
    spectrum: EnergySpectrum = field(repr=False)
    obs: Observations = field(repr=False)
    zeta_ci: LikelihoodInterval | None = None
    delta_ci: LikelihoodInterval | None = None

    @property
    def n(self) -> int:
        return self.spectrum.n

    @property
    def z(self) -> float:
        return math.exp(self.log_z) if self.log_z < 709 else math.inf

    @property
    def ground_energy(self) -> float:
        return self.spectrum.ground_energy

    @property
    def ground_degeneracy(self) -> int:
        return self.spectrum.ground_degeneracy

    @property
    def ground_state(self) -> int:
        return self.spectrum.ground_state

    @property
    def unbounded(self) -> bool:
        return any(ci is not None and ci.unbounded for ci in (self.zeta_ci, self.delta_ci))

    def with_intervals(self) -> "FitResult":
        zci = likelihood_interval(self, "zeta")
        dci = likelihood_interval(self, "delta") if self.model == "zeta-delta" else None
        return replace(self, zeta_ci=zci, delta_ci=dci)

    def to_dict(self) -> dict[str, Any]:
        ci = lambda c: None if c is None else [_finite_or_none(c.lo), _finite_or_none(c.hi)]  # noqa: E731
        return {
            "model": self.model,
            "zeta": self.zeta,
            "delta": self.delta,
            "p_tilde": self.p_tilde,
            "zeta_ci": ci(self.zeta_ci),
            "delta_ci": ci(self.delta_ci),
            "unbounded_interval": self.unbounded,
            "log_likelihood": self.log_likelihood,
            "log_z": self.log_z,
            "n": self.n,
            "shots": self.shots,
            "ground_energy": self.ground_energy,
            "ground_degeneracy": self.ground_degeneracy,
            "ground_state": self.ground_state,
        }


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


def _prepare(energy: PuboPolynomial, counts, spectrum: EnergySpectrum | None):
    spec = energy_spectrum(energy) if spectrum is None else spectrum
    if len(spec.levels) < 2:
        raise DegenerateSpectrum("all states share one energy; the fit is undefined")
    return spec, observations(energy, counts)


def _p_tilde(spec: EnergySpectrum, zeta: float, delta: float, log_z: float) -> float:
    lw = log_weight(np.array([spec.ground_energy]), zeta, delta)[0]
    return float(min(1.0, math.exp(lw - log_z)))


def _result(model, spec, obs, zeta, delta) -> FitResult:
    d = 0.0 if delta is None else delta
    lz = log_partition(spec, zeta, d)
    return FitResult(model, float(zeta), None if delta is None else float(delta),
                     log_likelihood(spec, obs, zeta, d), lz, _p_tilde(spec, zeta, d, lz), obs.shots, spec, obs)


# -- pure model -----------------------------------------------------------
def _solve_mean(spec: EnergySpectrum, target: float) -> float:
    """zeta with <E>_zeta = target; <E>_zeta is strictly decreasing in zeta."""
    g = lambda z: spectrum_mean(spec, z) - target  # noqa: E731
    cap = _zeta_cap(spec)
    width = 1.0 / (spec.max_energy - spec.ground_energy)
    lo, hi = -width, width
    while g(lo) < 0:
        lo *= 2
        if -lo > cap:
            raise NonConvergence("could not bracket zeta")
    while g(hi) > 0:
        hi *= 2
        if hi > cap:
            raise NonConvergence("could not bracket zeta")
    return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def fit_zeta(energy: PuboPolynomial, counts, intervals: bool = True,
             spectrum: EnergySpectrum | None = None) -> FitResult:
    spec, obs = _prepare(energy, counts, spectrum)
    mean = obs.mean_energy()
    if not spec.ground_energy < mean < spec.max_energy:
        raise OutOfRange(
            f"sample mean energy {mean} is not strictly inside ({spec.ground_energy}, {spec.max_energy})")
    fit = _result("zeta", spec, obs, _solve_mean(spec, mean), None)
    return fit.with_intervals() if intervals else fit


# -- model with noise floor -----------------------------------------------
def _start_zeta(spec: EnergySpectrum, obs: Observations) -> float:
    mean = obs.mean_energy()
    gap = float(np.diff(spec.levels).min())
    if mean <= spec.ground_energy:
        return 10.0 / gap
    if mean >= spec.max_energy:
        return -10.0 / gap
    return _solve_mean(spec, mean)


def _best_mixture(spec: EnergySpectrum, obs: Observations, zeta: float) -> tuple[float, float]:
    """(max log-likelihood kernel, log delta) over delta >= 0 at fixed zeta.

    With the uniform-mixture weight w = 2^n delta / Z in [0, 1) the kernel is
    concave in w, so a bounded scalar search finds the global maximum.
    """
    lz = log_z0(spec, zeta)
    lb = -zeta * obs.energies - lz
    lu = -spec.n * LN2

    def neg(w):
        if w <= 0:
            return -float(obs.counts @ lb)
        return -float(obs.counts @ np.logaddexp(math.log1p(-w) + lb, math.log(w) + lu))

    res = minimize_scalar(neg, bounds=(0.0, 1.0 - 1e-15), method="bounded", options={"xatol": 1e-14})
    w = float(res.x)
    if neg(0.0) <= res.fun:
        return -neg(0.0), -math.inf
    return -float(res.fun), lz + math.log(w) - math.log1p(-w) - spec.n * LN2


def _maximise_zeta_delta(spec: EnergySpectrum, obs: Observations, zeta0: float,
                         restarts: int, seed: int) -> tuple[float, float]:
    cap = _zeta_cap(spec)
    # delta = s^2 * scale keeps delta >= 0 without a bound and the simplex well scaled
    scale = math.exp(log_z0(spec, zeta0) - spec.n * LN2)
    neg = lambda v: -_kernel(spec, obs, v[0], v[1] ** 2 * scale)  # noqa: E731
    step = 0.1 * max(abs(zeta0), 1.0 / (spec.max_energy - spec.ground_energy))
    # converge on the objective only: flat, non-identifiable directions are common
    opts = dict(xatol=math.inf, fatol=1e-10, maxiter=20000, maxfev=40000)
    bounds = [(-cap, cap), (None, None)]

    def run(x0):
        simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, 0.3]])
        simplex[:, 0] = np.clip(simplex[:, 0], -cap, cap)
        return minimize(neg, x0, method="Nelder-Mead", bounds=bounds,
                        options={**opts, "initial_simplex": simplex})

    rng = np.random.default_rng(seed)
    starts = [np.array([zeta0, 0.0])]
    for _ in range(restarts):
        starts.append(np.array([np.clip(zeta0 + step * 5 * rng.standard_normal(), -cap, cap),
                                rng.uniform(0.0, 2.0)]))
    runs = [run(x0) for x0 in starts]
    done = [r for r in runs if r.status == 0 and np.isfinite(r.fun)]
    if not done:
        raise NonConvergence(f"simplex search did not converge: {runs[0].message}")
    best = min(done, key=lambda r: r.fun)
    zeta, delta = float(best.x[0]), float(best.x[1] ** 2 * scale)

    # polish along the profile likelihood; it can only raise the maximum
    res = minimize_scalar(lambda z: -_best_mixture(spec, obs, z)[0],
                          bracket=(zeta - 0.1 * step, zeta + 0.1 * step), method="brent", tol=1e-12)
    if abs(res.x) <= cap and -res.fun >= -best.fun:
        zeta = float(res.x)
        delta = math.exp(_best_mixture(spec, obs, zeta)[1])
    return zeta, delta


def fit_zeta_delta(energy: PuboPolynomial, counts, intervals: bool = True,
                   spectrum: EnergySpectrum | None = None, restarts: int = RESTARTS,
                   seed: int = JITTER_SEED) -> FitResult:
    spec, obs = _prepare(energy, counts, spectrum)
    zeta, delta = _maximise_zeta_delta(spec, obs, _start_zeta(spec, obs), restarts, seed)
    fit = _result("zeta-delta", spec, obs, zeta, delta)
    return fit.with_intervals() if intervals else fit


# -- likelihood-ratio intervals ---------------------------------------------
def profile_interval(loglik: Callable[[float], float], x_hat: float, step: float,
                     lower: float = -math.inf, upper: float = math.inf,
                     ratio: float = LIKELIHOOD_RATIO, max_doublings: int = 64) -> LikelihoodInterval:
    """Points either side of ``x_hat`` where the likelihood falls to ``ratio`` of its peak.

    The scan walks outward with doubling steps, then bisects the crossing.  A
    side on which the ratio is never crossed inside [lower, upper] is
    reported as an infinite end point.
    """
    target = loglik(x_hat) + math.log(ratio)
    g = lambda x: loglik(x) - target  # noqa: E731

    def side(sign: int, bound: float) -> float:
        inside, s = x_hat, step
        for _ in range(max_doublings):
            x = x_hat + sign * s
            at_edge = (x >= bound) if sign > 0 else (x <= bound)
            if at_edge:
                x = bound
            if g(x) < 0:
                return brentq(g, min(inside, x), max(inside, x), xtol=1e-12 * max(1.0, abs(x_hat)))
            if at_edge:
                break
            inside, s = x, 2 * s
        return sign * math.inf

    return LikelihoodInterval(side(-1, lower), side(+1, upper))


def _profile_over_delta(spec, obs, zeta: float) -> float:
    return _best_mixture(spec, obs, zeta)[0]


def _profile_over_zeta(spec, obs, delta: float, z0: float, width: float) -> float:
    res = minimize_scalar(lambda z: -_kernel(spec, obs, z, delta),
                          bracket=(z0 - width, z0 + width), method="brent")
    return -res.fun


def likelihood_interval(fit: FitResult, parameter: str, ratio: float = LIKELIHOOD_RATIO) -> LikelihoodInterval:
    """Profile-likelihood interval at ``ratio`` of the maximum (0.60 ~ one standard deviation)."""
    spec, obs = fit.spectrum, fit.obs
    cap = _zeta_cap(spec)
    var = spectrum_variance(spec, fit.zeta)
    sigma = 1.0 / math.sqrt(obs.shots * var) if var > 0 else 1.0 / (spec.max_energy - spec.ground_energy)
    step = min(max(0.25 * sigma, 1e-9), cap)
    if parameter == "zeta":
        if fit.model == "zeta":
            f = lambda z: _kernel(spec, obs, z)  # noqa: E731
        else:
            f = lambda z: _profile_over_delta(spec, obs, z)  # noqa: E731
        return profile_interval(f, fit.zeta, step, -cap, cap, ratio)
    if parameter == "delta":
        if fit.model != "zeta-delta":
            raise ValidationError("the pure model has no delta parameter")
        scale = math.exp(log_z0(spec, fit.zeta) - spec.n * LN2)
        f = lambda d: _profile_over_zeta(spec, obs, d, fit.zeta, step)  # noqa: E731
        dstep = 0.25 * fit.delta if fit.delta > 1e-6 * scale else 1e-3 * scale
        iv = profile_interval(f, fit.delta, dstep, 0.0, fit.delta + 1e12 * scale, ratio)
        # delta = 0 is the edge of the domain, not an unresolved scan
        return LikelihoodInterval(max(iv.lo, 0.0) if math.isfinite(iv.lo) else 0.0, iv.hi)
    raise ValidationError(f"unknown parameter {parameter!r}; expected 'zeta' or 'delta'")


# -- derived quantities -----------------------------------------------------
def optimal_probability(p_tilde: float, degeneracy: int) -> float:
    """Total probability of all lowest-energy states when ``degeneracy`` of them share p_tilde."""
    if degeneracy < 1:
        raise ValidationError("degeneracy must be at least 1")
    return min(1.0, degeneracy * p_tilde)


def gain_ratio(p_tilde_noisy: float, p_tilde_noiseless: float, n: int) -> float:
    p0 = 2.0 ** -n
    denom = p_tilde_noiseless - p0
    if not denom > 0:
        raise DenominatorNonpositive(
            f"noiseless p_tilde {p_tilde_noiseless} does not exceed the uniform baseline {p0}")
    return (p_tilde_noisy - p0) / denom
