import math

import numpy as np
import pytest

from noisyqpu.bench import ghz_tiled_circuit, hahn_echo_circuit, idle_t1_circuit
from noisyqpu.densim import exact_distribution, sample_counts
from noisyqpu.errors import InvalidParameter, InvalidTriplet
from noisyqpu.noise import NoiseToggles, synthetic_snapshot
from noisyqpu.pipeline import compile_circuit
from noisyqpu.qcore import Topology, circuit_unitary

DECOHERENCE = NoiseToggles(init=False, decoherence=True, depolarizing=False, readout=False)
T1 = T2 = 1e-5


def p_one(circuit, snap=None, **kw):
    snap = snap or synthetic_snapshot(1, t1=T1, t2=T2)
    return exact_distribution(compile_circuit(circuit, snap, **kw).program)[1]


def test_idle_structure():
    c = idle_t1_circuit(1e-5)
    assert [g.name for g in c.instructions] == ["x", "delay", "measure"]
    assert c.metadata == {"benchmark": "idle-t1", "t": 1e-5}


def test_idle_zero_delay_keeps_excitation():
    assert p_one(idle_t1_circuit(0.0), toggles=DECOHERENCE) == pytest.approx(1.0, abs=1e-15)


def test_idle_at_t1():
    assert p_one(idle_t1_circuit(T1), toggles=DECOHERENCE) == pytest.approx(math.exp(-1), abs=1e-12)


def test_idle_expected_counts():
    p = p_one(idle_t1_circuit(T1), toggles=DECOHERENCE)
    assert 4096 * p == pytest.approx(1506.8, abs=0.1)
    hits = sample_counts([1 - p, p], 4096, seed=0).counts["1"]
    assert abs(hits - 4096 * p) <= 4 * math.sqrt(4096 * p * (1 - p))


def test_hahn_noiseless_is_identity_up_to_phase():
    u = circuit_unitary(hahn_echo_circuit(0.0))
    assert abs(abs(u[0, 0]) - 1) < 1e-12
    assert p_one(hahn_echo_circuit(0.0), ideal=True) == pytest.approx(0.0, abs=1e-15)


def test_hahn_at_t2():
    assert p_one(hahn_echo_circuit(T2), toggles=DECOHERENCE) == pytest.approx((1 - math.exp(-1)) / 2, abs=1e-12)
    assert p_one(hahn_echo_circuit(T2), toggles=DECOHERENCE) == pytest.approx(0.31606, abs=1e-5)


def test_hahn_long_time_limit():
    assert p_one(hahn_echo_circuit(50 * T2), toggles=DECOHERENCE) == pytest.approx(0.5, abs=1e-12)


def test_negative_delay():
    with pytest.raises(InvalidParameter):
        idle_t1_circuit(-1.0)
    with pytest.raises(InvalidParameter):
        hahn_echo_circuit(-1.0)


def ghz_distribution(topology, triplets):
    c = ghz_tiled_circuit(topology, triplets)
    snap = synthetic_snapshot(topology.num_qubits, topology)
    return exact_distribution(compile_circuit(c, snap, ideal=True).program)


def test_single_triplet():
    p = ghz_distribution(Topology.line(3), [(0, 1, 2)])
    assert p == pytest.approx([0.5, 0, 0, 0, 0, 0, 0, 0.5], abs=1e-12)


def test_two_triplets_independent():
    p = ghz_distribution(Topology.line(6), [(0, 1, 2), (5, 4, 3)]).reshape(8, 8)  # [high triplet, low triplet]
    a, b = p.sum(axis=0), p.sum(axis=1)
    assert np.allclose(p, np.outer(b, a), atol=1e-12)
    nz = p > 0
    mi = float(np.sum(p[nz] * np.log(p[nz] / np.outer(b, a)[nz])))
    assert abs(mi) <= 1e-10
    assert a[0] == pytest.approx(0.5) and a[7] == pytest.approx(0.5)


def test_only_triplet_qubits_are_measured():
    c = ghz_tiled_circuit(Topology.line(5), [(1, 2, 3)])
    assert c.num_qubits == 5 and c.measured_qubits() == [1, 2, 3]


@pytest.mark.parametrize("triplets", [
    [(0, 1, 2), (2, 3, 4)],
    [(0, 1, 1)],
    [(0, 2, 1)],
    [(3, 4, 5)],
    [],
])
def test_invalid_triplets(triplets):
    with pytest.raises(InvalidTriplet):
        ghz_tiled_circuit(Topology.line(5), triplets)
