from dataclasses import replace

import numpy as np
import pytest

from noisyqpu.densim import (
    DensityMatrix, apply_confusion, evolve_density, exact_distribution, marginal, measurement_distribution,
)
from noisyqpu.errors import RegisterTooLarge
from noisyqpu.noise import NoiseModel, NoiseToggles, apply_noise_pass, synthetic_snapshot
from noisyqpu.pipeline import compile_circuit
from noisyqpu.qcore import CX, Circuit, Delay, H, Measure, X, schedule_asap, substitute_to_native

from helpers import random_program

DECOHERENCE = NoiseToggles(init=False, decoherence=True, depolarizing=False, readout=False)


def unitary_only(program):
    ops = tuple(op for op in program.operations if op.is_unitary)
    pure = tuple(np.diag([1.0, 0.0]).astype(complex) for _ in program.init_states)
    return replace(program, operations=ops, init_states=pure)


def ghz3_program(**kw):
    c = Circuit(3, [H(0), CX(0, 1), CX(1, 2), Measure(0), Measure(1), Measure(2)])
    return compile_circuit(c, synthetic_snapshot(3), ideal=True, **kw).program


def test_noiseless_ghz_density():
    rho = evolve_density(ghz3_program()).data
    expected = np.zeros((8, 8))
    for i in (0, 7):
        for j in (0, 7):
            expected[i, j] = 0.5
    assert np.allclose(rho, expected, atol=1e-12)
    assert exact_distribution(ghz3_program()) == pytest.approx([0.5, 0, 0, 0, 0, 0, 0, 0.5], abs=1e-12)


def test_idle_program_at_t1():
    snap = synthetic_snapshot(1)
    t1 = snap.qubits[0].t1
    c = Circuit(1, [X(0), Delay(t1, 0), Measure(0)])
    prog = apply_noise_pass(c, schedule_asap(c, snap), NoiseModel(snap, DECOHERENCE))
    assert exact_distribution(prog)[1] == pytest.approx(np.exp(-1), abs=1e-12)


def test_empty_program():
    c = Circuit(2, [Measure(0), Measure(1)])
    prog = compile_circuit(c, synthetic_snapshot(2), ideal=True).program
    assert np.allclose(evolve_density(prog).data, np.diag([1, 0, 0, 0]))


def test_readout_on_excited_state():
    p = apply_confusion(np.array([0.0, 1.0]), (np.array([[1.0, 0.01], [0.0, 0.99]]),))
    assert p == pytest.approx([0.01, 0.99])


def test_maximally_mixed():
    rho = DensityMatrix(2, np.eye(4) / 4)
    assert measurement_distribution(rho, (0, 1)) == pytest.approx([0.25] * 4)


def test_marginal_bit_order():
    probs = np.zeros(8)
    probs[0b110] = 1.0  # q1 = q2 = 1
    assert marginal(probs, 3, (2, 0)).tolist() == [0, 1, 0, 0]  # bit0 <- q2, bit1 <- q0


def test_register_limit():
    prog = random_program(3, 0)
    with pytest.raises(RegisterTooLarge):
        evolve_density(prog, limit=2)


@pytest.mark.parametrize("seed", range(4))
def test_noiseless_purity(seed):
    prog = random_program(4, seed, gates=25)
    ideal = unitary_only(prog)
    assert evolve_density(ideal).purity() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_linearity(seed):
    prog = random_program(3, seed)
    rng = np.random.default_rng(seed)

    def rand_rho():
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        r = m @ m.conj().T
        return r / np.trace(r)

    r1, r2 = rand_rho(), rand_rho()
    mixed = evolve_density(prog, (r1 + r2) / 2).data
    avg = (evolve_density(prog, r1).data + evolve_density(prog, r2).data) / 2
    assert np.max(np.abs(mixed - avg)) <= 1e-10


def test_split_delay_matches_single_delay():
    snap = synthetic_snapshot(2, t1=3e-6, t2=4e-6)
    whole = Circuit(2, [H(0), H(1), Delay(2e-6, 0), CX(0, 1), Measure(0), Measure(1)])
    split = Circuit(2, [H(0), H(1), Delay(1e-6, 0), Delay(1e-6, 0), CX(0, 1), Measure(0), Measure(1)])
    model = NoiseModel(snap, DECOHERENCE)
    rhos = []
    for c in (whole, split):
        c = substitute_to_native(c, snap.basis)
        rhos.append(evolve_density(apply_noise_pass(c, schedule_asap(c, snap), model)).data)
    assert np.max(np.abs(rhos[0] - rhos[1])) <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_density_is_valid_state(seed):
    rho = evolve_density(random_program(4, seed, gates=30)).data
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10
    assert np.linalg.eigvalsh(rho).min() >= -1e-8
