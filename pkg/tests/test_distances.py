import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyqpu.densim import CountsHistogram
from noisyqpu.errors import ValidationError
from noisyqpu.metrics import (
    classical_fidelity, hellinger, jensen_shannon, kullback_leibler, total_variation,
)


@st.composite
def distributions(draw, k=3, size=None):
    size = size or draw(st.integers(1, 8))
    out = []
    for _ in range(k):
        w = np.array(draw(st.lists(st.floats(0, 1), min_size=size, max_size=size)))
        if w.sum() == 0:
            w[0] = 1.0
        out.append(w / w.sum())
    return out


def test_identical():
    p = [0.2, 0.3, 0.5]
    assert hellinger(p, p) == 0 and total_variation(p, p) == 0
    assert classical_fidelity(p, p) == pytest.approx(1.0)
    assert kullback_leibler(p, p) == 0 and jensen_shannon(p, p) == pytest.approx(0.0, abs=1e-16)


def test_disjoint_support():
    assert hellinger([1, 0], [0, 1]) == 1.0
    assert kullback_leibler([1, 0], [0, 1]) == math.inf
    assert jensen_shannon([1, 0], [0, 1]) == pytest.approx(math.log(2))


def test_closed_forms():
    assert hellinger([0.5, 0.5], [1, 0]) == pytest.approx(math.sqrt(1 - 1 / math.sqrt(2)), abs=1e-15)
    assert hellinger([0.5, 0.5], [1, 0]) == pytest.approx(0.54120, abs=1e-5)
    assert total_variation([1, 0], [0.5, 0.5]) == 0.5
    assert kullback_leibler([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)


def test_sparse_maps_and_histograms():
    a = {"00": 0.5, "11": 0.5}
    b = CountsHistogram(2, {"00": 3, "01": 1})
    assert total_variation(a, {k: v / 4 for k, v in b.counts.items()}) == pytest.approx(0.5)
    assert hellinger(a, b) == pytest.approx(hellinger([0.5, 0, 0, 0.5], [0.75, 0.25, 0, 0]))


@pytest.mark.parametrize("p,q", [
    ([0.5, 0.5], [1.0, 0, 0]),
    ([0.5, 0.4], [0.5, 0.5]),
    ([1.5, -0.5], [0.5, 0.5]),
    ({"0": 1.0}, {"00": 1.0}),
    ({"0": 1.0}, [1.0, 0.0]),
])
def test_invalid_inputs(p, q):
    with pytest.raises(ValidationError):
        hellinger(p, q)


@settings(max_examples=200)
@given(d=distributions())
def test_metric_axioms(d):
    p, q, r = d
    h = hellinger(p, q)
    assert h == pytest.approx(hellinger(q, p), abs=1e-15)
    assert 0 <= h <= 1
    assert h ** 2 + classical_fidelity(p, q) == pytest.approx(1.0, abs=1e-12)
    assert hellinger(p, r) <= h + hellinger(q, r) + 1e-12
    assert 0 <= jensen_shannon(p, q) <= math.log(2) + 1e-12
    assert total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-12
    assert kullback_leibler(p, q) >= -1e-12
