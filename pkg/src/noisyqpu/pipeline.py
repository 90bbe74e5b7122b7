"""End-to-end simulation: substitute, route, schedule, add noise, simulate, sample."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from noisyqpu.bench.pubo import EnergySpectrum, PuboPolynomial, energy_spectrum
from noisyqpu.bench.qaoa import LrSchedule, lr_qaoa_circuit
from noisyqpu.densim.counts import CountsHistogram, sample_counts
from noisyqpu.densim.density import DENSITY_LIMIT, exact_distribution
from noisyqpu.densim.trajectory import sample_trajectories
from noisyqpu.errors import NoisyQPUError, ValidationError
from noisyqpu.metrics.boltzmann import FitResult, fit_zeta, fit_zeta_delta, gain_ratio
from noisyqpu.noise.channels import PHENOMENOLOGICAL
from noisyqpu.noise.model import NoiseModel, NoiseToggles, NoisyProgram, apply_noise_pass
from noisyqpu.noise.snapshot import DeviceSnapshot
from noisyqpu.qcore.circuit import Circuit
from noisyqpu.qcore.schedule import Schedule, schedule_asap
from noisyqpu.qcore.transpile import route_nearest_neighbor, substitute_to_native

BACKENDS = ("density", "trajectory")
DEFAULT_SHOTS = 4096


@contextlib.contextmanager
def stage(name: str) -> Iterator[None]:
    """Prefix errors raised inside the block with the pipeline stage name."""
    try:
        yield
    except NoisyQPUError as exc:
        if str(exc).startswith(f"{name}:"):
            raise
        raise type(exc)(f"{name}: {exc}") from exc


@dataclass(frozen=True, eq=False)
class Compiled:
    circuit: Circuit
    schedule: Schedule
    program: NoisyProgram


@dataclass(frozen=True, eq=False)
class RunOutput:
    compiled: Compiled
    counts: CountsHistogram
    distribution: np.ndarray | None

    @property
    def stats(self) -> dict:
        return self.compiled.circuit.stats()


def compile_circuit(circuit: Circuit, snapshot: DeviceSnapshot, *, toggles: NoiseToggles | None = None,
                    ideal: bool = False, tphi_convention: str = PHENOMENOLOGICAL) -> Compiled:
    basis = snapshot.basis
    with stage("substitute"):
        native = substitute_to_native(circuit, basis)
    with stage("route"):
        routed = route_nearest_neighbor(native, snapshot.topology, gateset=basis)
    with stage("substitute"):
        routed = substitute_to_native(routed, basis)
    with stage("schedule"):
        sched = schedule_asap(routed, snapshot)
    with stage("noise"):
        model = None if ideal else NoiseModel(snapshot, toggles, tphi_convention)
        program = apply_noise_pass(routed, sched, model)
    return Compiled(routed, sched, program)


def simulate(compiled: Compiled, backend: str = "density", shots: int = DEFAULT_SHOTS,
             seed: int = 0) -> RunOutput:
    if backend not in BACKENDS:
        raise ValidationError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    with stage("simulate"):
        if backend == "density":
            dist = exact_distribution(compiled.program, limit=DENSITY_LIMIT)
            counts = sample_counts(dist, shots, seed)
        else:
            dist = None
            counts = sample_trajectories(compiled.program, shots, seed)
    return RunOutput(compiled, counts, dist)


def run_circuit(circuit: Circuit, snapshot: DeviceSnapshot, *, backend: str = "density",
                shots: int = DEFAULT_SHOTS, seed: int = 0, toggles: NoiseToggles | None = None,
                ideal: bool = False, tphi_convention: str = PHENOMENOLOGICAL) -> RunOutput:
    compiled = compile_circuit(circuit, snapshot, toggles=toggles, ideal=ideal, tphi_convention=tphi_convention)
    return simulate(compiled, backend, shots, seed)


# QAOA runs neglect relaxation and dephasing, as in the hardware comparison
QAOA_TOGGLES = NoiseToggles(init=True, decoherence=False, depolarizing=True, readout=True)


def fit_distribution(energy: PuboPolynomial, dist: np.ndarray, shots: int, model: str = "zeta-delta",
                     spectrum: EnergySpectrum | None = None, intervals: bool = False) -> FitResult:
    """Fit an exact distribution, treated as expected counts ``shots * p``."""
    fitter = {"zeta": fit_zeta, "zeta-delta": fit_zeta_delta}.get(model)
    if fitter is None:
        raise ValidationError(f"unknown fit model {model!r}")
    with stage("fit"):
        return fitter(energy, shots * np.asarray(dist, dtype=float), intervals=intervals, spectrum=spectrum)


@dataclass(frozen=True)
class QaoaPoint:
    n: int
    p_noisy: float
    p_ideal: float
    two_qubit_gates: int
    depth: int

    @property
    def gain(self) -> float:
        """Gain ratio; raises DenominatorNonpositive when the ideal circuit beats no random guess."""
        return gain_ratio(self.p_noisy, self.p_ideal, self.n)


def qaoa_point(energy: PuboPolynomial, schedule: LrSchedule, snapshot: DeviceSnapshot, *,
               toggles: NoiseToggles = QAOA_TOGGLES, model: str = "zeta-delta", shots: int = DEFAULT_SHOTS,
               spectrum: EnergySpectrum | None = None) -> QaoaPoint:
    """Fitted p_tilde with and without noise for one LR-QAOA circuit (density backend)."""
    spec = energy_spectrum(energy) if spectrum is None else spectrum
    circuit = lr_qaoa_circuit(energy, schedule)
    noisy = compile_circuit(circuit, snapshot, toggles=toggles)
    ideal = compile_circuit(circuit, snapshot, ideal=True)
    with stage("simulate"):
        d_noisy = exact_distribution(noisy.program)
        d_ideal = exact_distribution(ideal.program)
    p_noisy = fit_distribution(energy, d_noisy, shots, model, spec).p_tilde
    p_ideal = fit_distribution(energy, d_ideal, shots, model, spec).p_tilde
    stats = noisy.circuit.stats()
    return QaoaPoint(energy.n, p_noisy, p_ideal, stats["two_qubit_gates"], stats["depth"])
