"""Pure-state unravelling of NoisyPrograms (quantum trajectories).

Trajectories are evolved in batches: the state array has shape
``(batch,) + (2,) * n`` with axis ``1 + a`` holding qubit ``n - 1 - a``.
Batch ``b`` draws from its own stream ``SeedSequence(seed, spawn_key=(b,))``
and the batch size depends only on the register size, so a result is fixed
by (program, shots, seed).
"""

from __future__ import annotations

import numpy as np

from noisyqpu.densim.counts import CountsHistogram, bitstring
from noisyqpu.noise.model import NoisyProgram

STATE_BUDGET = 1 << 18  # amplitudes per batch


def _apply(psi: np.ndarray, matrix: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    k = len(qubits)
    u = matrix.reshape((2,) * (2 * k))
    target = [n - q for q in reversed(qubits)]  # +1 for the batch axis
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), target))
    return np.moveaxis(out, list(range(k)), target)


def _choose(rng: np.random.Generator, weights: np.ndarray) -> np.ndarray:
    """One categorical draw per column of ``weights`` (branches x batch)."""
    cum = np.cumsum(weights, axis=0)
    u = rng.random(weights.shape[1]) * cum[-1]
    return np.minimum((cum < u[None, :]).sum(axis=0), weights.shape[0] - 1)


def _initial(rng, program: NoisyProgram, batch: int) -> np.ndarray:
    n = program.num_qubits
    index = np.zeros(batch, dtype=np.int64)
    for q, s in enumerate(program.init_states):
        p1 = float(np.real(s[1, 1]))
        if p1 > 0:
            index |= (rng.random(batch) < p1).astype(np.int64) << q
    psi = np.zeros((batch, 1 << n), dtype=complex)
    psi[np.arange(batch), index] = 1.0
    return psi.reshape((batch,) + (2,) * n)


def _run_batch(program: NoisyProgram, batch: int, rng: np.random.Generator) -> np.ndarray:
    n = program.num_qubits
    psi = _initial(rng, program, batch)
    for op in program.operations:
        ops = op.channel.operators
        if len(ops) == 1:
            psi = _apply(psi, ops[0], op.qubits, n)
            continue
        mix = op.mixture
        if mix is not None:
            probs, unitaries = mix
            pick = rng.choice(len(probs), size=batch, p=probs / probs.sum())
            for i, u in enumerate(unitaries):
                sel = np.nonzero(pick == i)[0]
                if sel.size and not np.allclose(u, u[0, 0] * np.eye(u.shape[0])):
                    psi[sel] = _apply(psi[sel], u, op.qubits, n)
            continue
        branches = np.stack([_apply(psi, k, op.qubits, n) for k in ops])
        weights = np.sum(np.abs(branches.reshape(len(ops), batch, -1)) ** 2, axis=2)
        pick = _choose(rng, weights)
        psi = branches[pick, np.arange(batch)]
        norms = np.sqrt(weights[pick, np.arange(batch)])
        psi /= norms.reshape((batch,) + (1,) * n)
    probs = np.abs(psi.reshape(batch, -1)) ** 2
    m = len(program.measured)
    if m == 0:
        return np.zeros(batch, dtype=np.int64)
    if list(program.measured) != list(range(n)):
        t = probs.reshape((batch,) + (2,) * n)
        keep = [n - q for q in reversed(program.measured)]
        rest = [a for a in range(1, n + 1) if a not in keep]
        t = np.transpose(t, [0] + keep + rest)
        if rest:
            t = t.sum(axis=tuple(range(m + 1, n + 1)))
        probs = t.reshape(batch, 1 << m)
    outcome = _choose(rng, probs.T)
    for k, c in enumerate(program.confusion):
        bit = (outcome >> k) & 1
        flip_p = np.where(bit == 0, c[1, 0], c[0, 1])
        flips = rng.random(batch) < flip_p
        outcome ^= flips.astype(np.int64) << k
    return outcome


def sample_trajectories(program: NoisyProgram, shots: int, seed: int = 0) -> CountsHistogram:
    """Sample ``shots`` measurement records, one stochastic trajectory each."""
    n = program.num_qubits
    batch = max(1, min(shots, STATE_BUDGET >> n))
    outcomes = []
    done, b = 0, 0
    while done < shots:
        size = min(batch, shots - done)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(b,)))
        outcomes.append(_run_batch(program, size, rng))
        done += size
        b += 1
    m = len(program.measured)
    hist = np.bincount(np.concatenate(outcomes), minlength=1 << m)
    return CountsHistogram(m, {bitstring(i, m): int(c) for i, c in enumerate(hist) if c})
