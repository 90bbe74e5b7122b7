"""Distribution distances and Boltzmann maximum-likelihood fits."""

from noisyqpu.metrics.boltzmann import (
    LIKELIHOOD_RATIO, FitResult, LikelihoodInterval, boltzmann_distribution, fit_zeta,
    fit_zeta_delta, gain_ratio, likelihood_interval, log_likelihood, log_partition,
    mean_energy_at_zeta, optimal_probability, profile_interval,
)
from noisyqpu.metrics.distances import (
    classical_fidelity, hellinger, jensen_shannon, kullback_leibler, total_variation,
)

__all__ = [
    "LIKELIHOOD_RATIO", "FitResult", "LikelihoodInterval", "boltzmann_distribution", "fit_zeta",
    "fit_zeta_delta", "gain_ratio", "likelihood_interval", "log_likelihood", "log_partition",
    "mean_energy_at_zeta", "optimal_probability", "profile_interval",
    "classical_fidelity", "hellinger", "jensen_shannon", "kullback_leibler", "total_variation",
]
