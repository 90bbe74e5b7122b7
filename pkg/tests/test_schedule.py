import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyqpu.errors import MissingDuration
from noisyqpu.qcore import CX, Barrier, Circuit, Delay, Gate, Measure, X, schedule_asap

DUR = {"x": 35e-9, "h": 35e-9, "sx": 35e-9, "rz": 0.0, "cx": 500e-9}


def lookup(name, qubits):
    try:
        return DUR[name]
    except KeyError:
        raise MissingDuration(name) from None


def test_single_qubit_chain():
    s = schedule_asap(Circuit(1, [X(0), Delay(100e-9, 0), Measure(0)]), lookup)
    (gate, delay, meas) = s.timeline(0)
    assert (gate.start, gate.end, gate.instruction) == (0.0, 35e-9, 0)
    assert delay.instruction == 1 and delay.start == 35e-9 and delay.end == pytest.approx(135e-9)
    assert meas.length == 0 and meas.instruction == 2
    assert s.makespan == pytest.approx(135e-9)


def test_idle_before_two_qubit_gate():
    s = schedule_asap(Circuit(2, [X(0), CX(0, 1)]), lookup)
    idle, cx = s.timeline(1)
    assert idle.idle and idle.length == 35e-9
    assert cx.start == s.timeline(0)[1].start == 35e-9


def test_empty_circuit():
    s = schedule_asap(Circuit(2, []), lookup)
    assert s.makespan == 0 and s.timelines == ((), ())


def test_barrier_synchronises():
    s = schedule_asap(Circuit(2, [X(0), Barrier((0, 1)), X(1)]), lookup)
    assert s.timeline(1)[-1].start == 35e-9


def test_missing_duration():
    with pytest.raises(MissingDuration):
        schedule_asap(Circuit(2, [Gate("ecr", (0, 1))]), lookup)


@st.composite
def circuits(draw):
    n = draw(st.integers(1, 4))
    gates = []
    for _ in range(draw(st.integers(0, 15))):
        kind = draw(st.sampled_from(["x", "h", "rz", "cx", "delay", "barrier"]))
        qs = draw(st.permutations(range(n)))
        if kind == "cx" and n >= 2:
            gates.append(CX(qs[0], qs[1]))
        elif kind == "delay":
            gates.append(Delay(draw(st.floats(0, 1e-6)), qs[0]))
        elif kind == "barrier":
            gates.append(Barrier(qs[: draw(st.integers(1, n))]))
        elif kind == "rz":
            gates.append(Gate("rz", (qs[0],), (0.1,)))
        elif kind in ("x", "h"):
            gates.append(Gate(kind, (qs[0],)))
    gates += [Measure(q) for q in range(n) if draw(st.booleans())]
    return Circuit(n, gates)


@settings(max_examples=100, deadline=None)
@given(c=circuits())
def test_timelines_contiguous_and_complete(c):
    s = schedule_asap(c, lookup)
    for q in range(c.num_qubits):
        line = s.timeline(q)
        t = 0.0
        for iv in line:
            assert iv.start == t
            assert iv.end >= iv.start
            if iv.idle:
                assert iv.length > 0
            t = iv.end
        if line:
            assert t == s.makespan
    for idx, g in enumerate(c.instructions):
        if len(g.qubits) == 2 and g.name == "cx":
            spans = {(iv.start, iv.end) for q in g.qubits for iv in s.timeline(q) if iv.instruction == idx}
            assert len(spans) == 1
