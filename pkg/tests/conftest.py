import numpy as np
import pytest

from noisyqpu.qcore import Circuit, circuit_unitary


def layout_permutation(layout: dict, n: int) -> np.ndarray:
    """Permutation taking logical basis states to physical ones (bit l moves to layout[l])."""
    dim = 1 << n
    perm = np.zeros((dim, dim))
    for i in range(dim):
        j = 0
        for l, p in layout.items():
            j |= ((i >> int(l)) & 1) << int(p)
        perm[j, i] = 1
    return perm


def routed_equivalent(original: Circuit, routed: Circuit) -> tuple[np.ndarray, np.ndarray]:
    """(routed unitary in logical order, original unitary); assumes the identity initial layout."""
    n = routed.num_qubits
    full = Circuit(n, [g for g in original.instructions if g.is_unitary])
    final = layout_permutation(routed.metadata["final_layout"], n)
    return final.T @ circuit_unitary(routed), circuit_unitary(full)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
