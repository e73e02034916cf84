"""Brute-force state-vector simulation of period finding at small sizes.

This is the ground truth the closed-form module is checked against: the
transform is applied gate by gate (Hadamards, kept controlled rotations,
final qubit reversal) to a dense amplitude vector.  Qubit n holds bit n of
the basis index, i.e. the coefficient of 2^n.

Circuit layout: targets are processed from the most significant qubit down.
The qubit initially holding bit 2L-1-m ends up as output bit m; before moving
on, it receives controlled rotations by pi/2^d from every less significant
qubit n with d = (2L-1-m) - n.  Each such gate instance corresponds to
exactly one ordered bit pair (m, n) with m + n <= 2L - 2 of the closed-form
phase sum, and the Hadamards supply the m + n = 2L - 1 diagonal.  The final
bit reversal makes the full-depth circuit equal the plain DFT matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qpf import AqftSpec, Distribution

#: Dense complex amplitude vector of length 2^n.
StateVector = np.ndarray


def hadamard(state: StateVector, qubit: int) -> None:
    """In-place Hadamard on one qubit."""
    n = state.shape[0]
    view = state.reshape(n >> (qubit + 1), 2, 1 << qubit)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    inv = 1.0 / math.sqrt(2.0)
    view[:, 0, :] = (a + b) * inv
    view[:, 1, :] = (a - b) * inv


def controlled_phase(state: StateVector, qa: int, qb: int, angle: float) -> None:
    """In-place phase e^{i angle} on amplitudes where both qubits are 1."""
    if qa < qb:
        qa, qb = qb, qa
    n = state.shape[0]
    view = state.reshape(n >> (qa + 1), 2, 1 << (qa - qb - 1), 2, 1 << qb)
    view[:, 1, :, 1, :] *= np.exp(1j * angle)


def bit_reverse(state: StateVector) -> StateVector:
    """Reverse the qubit order of the register."""
    q = state.shape[0].bit_length() - 1
    return state.reshape([2] * q).transpose(range(q - 1, -1, -1)).reshape(-1)


def apply_aqft_circuit(
    state: StateVector,
    spec: AqftSpec,
    noise_angles: np.ndarray | None = None,
) -> StateVector:
    """Apply the truncated transform gate by gate; returns a new vector.

    noise_angles, when given, is a (2L, 2L) matrix of per-gate angle offsets
    indexed by the ordered bit pair (m, n) the gate realizes, matching the
    noise injection of the closed-form module.
    """
    q = spec.n_bits
    if state.shape != (spec.size,):
        raise ValueError(f"state must have length 2^{q}")
    if spec.d_keep_max < 0:
        # A circuit cannot drop the Hadamards' own phases; the literal window
        # at d_max < 2 excludes them and has no gate realization.
        raise ValueError("window excludes the Hadamard diagonal; no circuit realizes it")
    out = np.array(state, dtype=np.complex128, copy=True)
    for m in range(q):
        target = q - 1 - m
        hadamard(out, target)
        for n in range(target - 1, -1, -1):
            d = target - n
            if d <= spec.d_keep_max:
                angle = math.pi / 2**d
                if noise_angles is not None:
                    angle += noise_angles[m, n]
                controlled_phase(out, target, n, angle)
    return bit_reverse(out)


def aqft_matrix(spec: AqftSpec) -> np.ndarray:
    """Dense transform matrix from the closed-form phase sum (2L <= 10)."""
    if spec.n_bits > 10:
        raise ValueError("dense matrix limited to 2L <= 10")
    q, size = spec.n_bits, spec.size
    bits = ((np.arange(size)[:, None] >> np.arange(q)[None, :]) & 1).astype(float)
    theta = bits @ spec.weight_matrix() @ bits.T  # [j, k]
    return np.exp(1j * theta) / math.sqrt(size)


@dataclass(frozen=True)
class PeriodicInput:
    """Equal-weight state on k0, k0+r, ..., k0+(M-1) r with M = floor(2^(2L)/r).

    Amplitudes are sqrt(r)/2^L each, so the norm is sqrt(r M / 2^(2L)): the
    partial period beyond M full steps is truncated, exactly as in the
    closed-form probabilities.  The term count is fixed at M for every k0 so
    that outcome probabilities at full depth do not depend on k0.
    """

    L: int
    r: int
    k0: int = 0

    def __post_init__(self):
        if not 2 <= self.r < (1 << self.L):
            raise ValueError(f"r must be in [2, 2^L), got {self.r}")
        if not 0 <= self.k0 < self.r:
            raise ValueError(f"k0 must be in [0, r), got {self.k0}")

    def state(self) -> StateVector:
        size = 1 << (2 * self.L)
        m_terms = size // self.r
        state = np.zeros(size, dtype=np.complex128)
        support = self.k0 + self.r * np.arange(m_terms)
        state[support] = math.sqrt(self.r) / 2**self.L
        return state


def aqft_on_periodic(
    inp: PeriodicInput,
    spec: AqftSpec,
    noise_angles: np.ndarray | None = None,
) -> Distribution:
    """Outcome distribution of the circuit applied to a periodic input."""
    if inp.L != spec.L:
        raise ValueError("PeriodicInput and AqftSpec disagree on L")
    final = apply_aqft_circuit(inp.state(), spec, noise_angles)
    return Distribution(
        L=spec.L, r=inp.r, d_max=spec.d_max, variant=spec.variant,
        probabilities=np.abs(final) ** 2,
    )


def multiplicative_order(m: int, n: int) -> int:
    """Smallest r > 0 with m^r = 1 mod n; requires gcd(m, n) = 1."""
    if math.gcd(m, n) != 1:
        raise ValueError(f"gcd({m}, {n}) != 1")
    r, value = 1, m % n
    while value != 1:
        value = value * m % n
        r += 1
    return r


def qpf_distribution_exact(N: int, m: int, spec: AqftSpec) -> Distribution:
    """Exact outcome probabilities of one full period-finding run.

    Computes f(k) = m^k mod N classically for all k < 2^(2L), marginalizes
    over the value register and pushes every branch through the circuit.
    Branch k0 has its true support {k0 + n r < 2^(2L)}, so when r does not
    divide 2^(2L) some branches carry one more term than the fixed-M
    convention of the closed-form module; the distributions agree exactly
    only when r | 2^(2L).
    """
    if spec.n_bits > 20:
        raise ValueError("state-vector simulation limited to 2L <= 20")
    L = N.bit_length()
    if L != spec.L:
        raise ValueError(f"spec.L = {spec.L} but N = {N} has bit length {L}")
    if math.gcd(m, N) != 1:
        raise ValueError(f"gcd({m}, {N}) != 1")
    size = spec.size
    r = multiplicative_order(m, N)
    amp = 1.0 / 2**spec.L
    probs = np.zeros(size, dtype=np.float64)
    for k0 in range(r):
        branch = np.zeros(size, dtype=np.complex128)
        branch[k0::r] = amp
        final = apply_aqft_circuit(branch, spec)
        probs += final.real**2 + final.imag**2
    return Distribution(
        L=spec.L, r=r, d_max=spec.d_max, variant=spec.variant, probabilities=probs,
    )
