"""Density-matrix and trajectory simulation of noisy programs."""

from noisyqpu.densim.counts import BIT_ORDER, CountsHistogram, bitstring, sample_counts
from noisyqpu.densim.density import (
    DENSITY_LIMIT, DensityMatrix, apply_confusion, evolve_density, exact_distribution, marginal,
    measurement_distribution,
)
from noisyqpu.densim.trajectory import sample_trajectories

__all__ = [
    "BIT_ORDER", "CountsHistogram", "bitstring", "sample_counts", "DENSITY_LIMIT", "DensityMatrix",
    "apply_confusion", "evolve_density", "exact_distribution", "marginal", "measurement_distribution",
    "sample_trajectories",
]
