import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyqpu.bench import JssInstance, PuboPolynomial, energy_spectrum, jss_dense_pubo
from noisyqpu.bench.pubo import from_terms
from noisyqpu.densim import CountsHistogram, sample_counts
from noisyqpu.errors import DegenerateSpectrum, DenominatorNonpositive, OutOfRange, ValidationError
from noisyqpu.metrics import (
    LIKELIHOOD_RATIO, boltzmann_distribution, fit_zeta, fit_zeta_delta, gain_ratio, likelihood_interval,
    mean_energy_at_zeta, optimal_probability, profile_interval,
)

TWO_LEVEL = from_terms(1, [((0,), 1.0)])
JSS4 = jss_dense_pubo(JssInstance((3, 1, 2, 4)))
JSS4_GROUND = energy_spectrum(JSS4).ground_state


def test_two_level_analytic():
    assert fit_zeta(TWO_LEVEL, [75, 25], intervals=False).zeta == pytest.approx(math.log(3), abs=1e-12)


def test_exact_counts_recover_zeta():
    for z0 in (-0.4, 0.05, 0.3, 1.2):
        counts = 4096 * boltzmann_distribution(JSS4, z0)
        assert fit_zeta(JSS4, counts, intervals=False).zeta == pytest.approx(z0, abs=1e-9)


def test_uniform_counts_give_zero():
    assert abs(fit_zeta(JSS4, np.full(16, 10.0), intervals=False).zeta) <= 1e-9


def test_mean_energy_limits():
    e = JSS4.energies(np.arange(16))
    assert mean_energy_at_zeta(JSS4, 0.0) == pytest.approx(e.mean())
    assert mean_energy_at_zeta(JSS4, 50.0) == pytest.approx(e.min(), abs=1e-6)


@st.composite
def spectra(draw):
    n = draw(st.integers(2, 8))
    terms = draw(st.lists(st.tuples(st.lists(st.integers(0, n - 1), min_size=1, max_size=3, unique=True),
                                    st.integers(-4, 4).map(float)), min_size=1, max_size=10))
    return from_terms(n, terms)


@settings(max_examples=100, deadline=None)
@given(energy=spectra(), z=st.floats(-3, 3), dz=st.floats(1e-3, 1))
def test_mean_energy_strictly_decreasing(energy, z, dz):
    spec = energy_spectrum(energy)
    if len(spec.levels) < 2:
        return
    assert mean_energy_at_zeta(spec, z + dz) < mean_energy_at_zeta(spec, z)


@pytest.mark.parametrize("c", [0.1, 3.0, 17.0])
def test_scale_covariance(c):
    counts = sample_counts(boltzmann_distribution(JSS4, 0.2), 5000, seed=1)
    base = fit_zeta(JSS4, counts, intervals=False)
    scaled = fit_zeta(c * JSS4, counts, intervals=False)
    assert scaled.zeta == pytest.approx(base.zeta / c, abs=1e-6)
    assert scaled.p_tilde == pytest.approx(base.p_tilde, abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_noise_floor_never_lowers_likelihood(seed):
    p = boltzmann_distribution(JSS4, 0.3, delta=0.002 * seed)
    counts = sample_counts(p, 3000, seed=seed)
    pure = fit_zeta(JSS4, counts, intervals=False)
    mixed = fit_zeta_delta(JSS4, counts, intervals=False)
    assert mixed.log_likelihood >= pure.log_likelihood - 1e-9


def test_pure_data_gives_negligible_floor():
    counts = 1e5 * boltzmann_distribution(JSS4, 0.3)
    fit = fit_zeta_delta(JSS4, counts)
    assert fit.delta <= 1e-3
    assert fit.zeta_ci.contains(0.3)


def test_uniform_counts_floor_model():
    fit = fit_zeta_delta(JSS4, np.full(16, 100.0), intervals=False)
    assert fit.p_tilde == pytest.approx(1 / 16, rel=0.1)


def test_intervals_contain_estimate():
    counts = sample_counts(boltzmann_distribution(JSS4, 0.25, 0.01), 20_000, seed=4)
    fit = fit_zeta_delta(JSS4, counts)
    assert fit.zeta_ci.contains(fit.zeta) and fit.delta_ci.contains(fit.delta)
    assert fit.zeta_ci.lo < fit.zeta < fit.zeta_ci.hi
    assert 0 < fit.p_tilde <= 1 and fit.z > 0


def test_interval_width_shrinks_with_shots():
    p = boltzmann_distribution(JSS4, 0.2)
    widths = []
    for shots in (1e3, 1e4, 1e5):
        ci = fit_zeta(JSS4, shots * p).zeta_ci
        widths.append((ci.hi - ci.lo) * math.sqrt(shots))
    assert max(widths) / min(widths) <= 1.2


def test_gaussian_crossing():
    ci = profile_interval(lambda x: -0.5 * x * x, 0.0, 0.1)
    half = math.sqrt(-2 * math.log(LIKELIHOOD_RATIO))
    assert ci.lo == pytest.approx(-half, abs=1e-9) and ci.hi == pytest.approx(half, abs=1e-9)


def test_single_shot_is_unbounded():
    counts = CountsHistogram(4, {format(JSS4_GROUND, "04b"): 1})
    fit = fit_zeta_delta(JSS4, counts)
    assert fit.unbounded
    assert fit.to_dict()["unbounded_interval"] is True


def test_fit_report_keys():
    fit = fit_zeta_delta(JSS4, np.arange(1.0, 17.0))
    d = fit.to_dict()
    for key in ("zeta", "delta", "p_tilde", "zeta_ci", "delta_ci", "log_likelihood", "n", "ground_energy",
                "ground_degeneracy"):
        assert key in d
    assert d["n"] == 4 and d["ground_degeneracy"] == 2


def test_p_tilde_is_single_state_probability():
    fit = fit_zeta(JSS4, 1000 * boltzmann_distribution(JSS4, 0.5), intervals=False)
    assert fit.p_tilde == pytest.approx(boltzmann_distribution(JSS4, 0.5)[JSS4_GROUND], abs=1e-9)
    assert optimal_probability(fit.p_tilde, 2) == pytest.approx(2 * fit.p_tilde)


def test_sample_mean_at_extreme_is_out_of_range():
    with pytest.raises(OutOfRange):
        fit_zeta(TWO_LEVEL, [10, 0])


def test_flat_energy_is_degenerate():
    with pytest.raises(DegenerateSpectrum):
        fit_zeta(PuboPolynomial.constant(2, 1.0), [1, 1, 1, 1])


def test_count_shape_mismatch():
    with pytest.raises(ValidationError):
        fit_zeta(JSS4, [1, 2, 3])


def test_delta_interval_needs_floor_model():
    with pytest.raises(ValidationError):
        likelihood_interval(fit_zeta(TWO_LEVEL, [75, 25]), "delta")


def test_gain_ratio():
    assert gain_ratio(0.3, 0.3, 4) == pytest.approx(1.0)
    assert gain_ratio(1 / 16, 0.3, 4) == 0.0
    assert gain_ratio(0.28125, 0.5, 4) == pytest.approx(0.5)
    with pytest.raises(DenominatorNonpositive):
        gain_ratio(0.1, 1 / 16, 4)
