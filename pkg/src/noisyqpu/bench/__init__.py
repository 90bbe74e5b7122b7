"""Benchmark generators: characterisation circuits, JSS encodings, LR-QAOA."""

from noisyqpu.bench.circuits import ghz_tiled_circuit, hahn_echo_circuit, idle_t1_circuit
from noisyqpu.bench.jss import (
    JssInstance, dense_assignment, jss_dense_pubo, jss_onehot_pubo, onehot_assignment, partition,
)
from noisyqpu.bench.pubo import (
    EnergySpectrum, PuboPolynomial, brute_force_minima, energy_spectrum, evaluate_energy,
)
from noisyqpu.bench.qaoa import LrSchedule, cost_block, lr_qaoa_circuit, mixer_block, spin_hamiltonian

__all__ = [
    "ghz_tiled_circuit", "hahn_echo_circuit", "idle_t1_circuit",
    "JssInstance", "dense_assignment", "jss_dense_pubo", "jss_onehot_pubo", "onehot_assignment",
    "partition", "EnergySpectrum", "PuboPolynomial", "brute_force_minima", "energy_spectrum",
    "evaluate_energy", "LrSchedule", "cost_block", "lr_qaoa_circuit", "mixer_block",
    "spin_hamiltonian",
]
