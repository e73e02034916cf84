"""Closed-form measurement statistics of quantum period finding under a
truncated Fourier transform.

The transform acts on a 2L-qubit register and keeps only the phase
contributions of bit pairs (m, n) inside a window: writing [x]_m for the
coefficient of 2^m in x, the phase attached to basis states j, k is

    phi(j, k) = (2 pi / 2^(2L)) * sum_{(m,n) kept} [j]_m [k]_n 2^(m+n)

A pair on the diagonal m + n = 2L - 1 - d corresponds to a controlled
rotation by pi/2^d in the circuit picture (d = 0 being the Hadamard's own
phase), so the "physical" window keeps m + n >= 2L - 1 - d_max, i.e. exactly
the gates with rotation angle at least pi/2^d_max.  The "literal" window
keeps m + n >= 2L - d_max + 1 instead; it is retained for comparison but is
off by two diagonals from the circuit reading (its d_max = 1 setting would
delete every phase including the Hadamards').

Probabilities of measuring j after period finding on a period-r input use a
fixed summation convention: M = floor(2^(2L) / r) terms and offset k0 = 0,

    Pr(j) = | (sqrt(r) / 2^(2L)) * sum_{p=0}^{M-1} exp(i phi(j, p r)) |^2

so the total mass over j is r * M / 2^(2L), slightly below 1 when r does not
divide 2^(2L); the missing tail is the truncated partial period.

``aqft_phase`` is the exact integer-arithmetic reference.  The fast paths
precompute per-j partial sums psi_n(j) = sum_m [j]_m W[m, n] so that each k
costs one dot product; a naive per-term reference (``prob_j_reference``) is
kept for differential testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

VARIANTS = ("physical", "literal")


@dataclass(frozen=True)
class AqftSpec:
    """Parameters of the truncated transform on 2L qubits.

    d_max is the largest kept controlled-rotation index (physical variant);
    bits are indexed so that [x]_m is the coefficient of 2^m.
    """

    L: int
    d_max: int
    variant: str = "physical"

    def __post_init__(self):
        if not 2 <= self.L <= 32:
            raise ValueError(f"L must be in [2, 32], got {self.L}")
        if not 0 <= self.d_max <= 2 * self.L + 1:
            raise ValueError(f"d_max must be in [0, {2*self.L+1}], got {self.d_max}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @property
    def n_bits(self) -> int:
        return 2 * self.L

    @property
    def size(self) -> int:
        return 1 << (2 * self.L)

    @property
    def d_keep_max(self) -> int:
        """Largest kept rotation index d (diagonal m+n = 2L-1-d); -1 if none.

        The literal window is the physical one shifted by two: its printed
        lower bound m+n >= 2L - d_max + 1 equals 2L - 1 - (d_max - 2).
        """
        eff = self.d_max if self.variant == "physical" else self.d_max - 2
        return min(eff, self.n_bits - 1)

    def keep_mask(self) -> np.ndarray:
        """Boolean (2L, 2L) array, entry [m, n] true when the pair is kept."""
        q = self.n_bits
        mn = np.arange(q)[:, None] + np.arange(q)[None, :]
        return (mn >= q - 1 - self.d_keep_max) & (mn <= q - 1)

    def controlled_mask(self) -> np.ndarray:
        """Kept pairs that correspond to controlled gates (m + n <= 2L - 2)."""
        q = self.n_bits
        mn = np.arange(q)[:, None] + np.arange(q)[None, :]
        return self.keep_mask() & (mn <= q - 2)

    def weight_matrix(self) -> np.ndarray:
        """(2L, 2L) phase weights in radians: 2 pi 2^(m+n-2L) on kept pairs."""
        q = self.n_bits
        mn = np.arange(q)[:, None] + np.arange(q)[None, :]
        w = TWO_PI * np.power(2.0, (mn - q).astype(float))
        return np.where(self.keep_mask(), w, 0.0)


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian per-gate angle errors: each controlled gate's angle becomes
    pi/2^d + delta with delta ~ N(0, sigma^2), drawn once per gate per trial."""

    sigma: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def draw(self, spec: AqftSpec, trial: int) -> np.ndarray:
        """Deterministic (2L, 2L) offset matrix for one trial.

        Depends only on (seed, trial), never on evaluation order: trial i uses
        the generator PCG64(SeedSequence(entropy=seed, spawn_key=(i,))).
        Entries outside the kept controlled-gate window are zeroed.
        """
        q = spec.n_bits
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(trial,))
        rng = np.random.Generator(np.random.PCG64(ss))
        delta = rng.normal(0.0, self.sigma, size=(q, q))
        return np.where(spec.controlled_mask(), delta, 0.0)


class NoisyEstimate(NamedTuple):
    mean: float
    stderr: float


@dataclass
class Distribution:
    """Measurement probabilities over outcomes j = 0 .. 2^(2L) - 1."""

    L: int
    r: int
    d_max: int
    variant: str
    probabilities: np.ndarray
    sigma: float = 0.0
    seed: int | None = None

    @property
    def size(self) -> int:
        return 1 << (2 * self.L)

    def total_mass(self) -> float:
        return float(self.probabilities.sum())

    def expected_mass(self) -> float:
        """r * floor(2^(2L)/r) / 2^(2L), the mass of the truncated input."""
        return self.r * (self.size // self.r) / self.size

    def useful_mass(self) -> float:
        return float(self.probabilities[useful_j_set(self.r, self.L)].sum())

    def to_csv(self, path) -> None:
        """Write `j,probability` rows preceded by a `#` metadata line."""
        with open(path, "w") as fh:
            seed = "none" if self.seed is None else self.seed
            fh.write(
                f"# L={self.L} r={self.r} d_max={self.d_max} "
                f"variant={self.variant} sigma={self.sigma!r} seed={seed}\n"
            )
            fh.write("j,probability\n")
            for j, p in enumerate(self.probabilities):
                fh.write(f"{j},{float(p)!r}\n")


def _check_jk(value: int, spec: AqftSpec, name: str) -> None:
    if not 0 <= value < spec.size:
        raise ValueError(f"{name} must be in [0, {spec.size}), got {value}")


def aqft_phase(j: int, k: int, spec: AqftSpec, noise_angles: np.ndarray | None = None) -> float:
    """Transform phase for the (j, k) matrix element, reduced mod 2 pi.

    Exact integer reference: the windowed bilinear sum is accumulated as a
    Python integer and reduced mod 2^(2L) before scaling, so for the physical
    variant at d_max >= 2L - 1 the result is exactly congruent to
    2 pi j k / 2^(2L).
    """
    _check_jk(j, spec, "j")
    _check_jk(k, spec, "k")
    q = spec.n_bits
    lo = q - 1 - spec.d_keep_max
    total = 0
    noise = 0.0
    for m in range(q):
        if not (j >> m) & 1:
            continue
        for n in range(max(0, lo - m), min(q, q - m)):
            if (k >> n) & 1:
                total += 1 << (m + n)
                if noise_angles is not None and m + n <= q - 2:
                    noise += noise_angles[m, n]
    phase = TWO_PI * (total % spec.size) / spec.size + noise
    return phase % TWO_PI


def _bit_matrix(values: np.ndarray, n_bits: int) -> np.ndarray:
    values = np.asarray(values).astype(np.uint64)
    shifts = np.arange(n_bits, dtype=np.uint64)[None, :]
    return ((values[:, None] >> shifts) & np.uint64(1)).astype(np.float64)


def _masked_noise(spec: AqftSpec, noise_angles: np.ndarray | None) -> np.ndarray | None:
    if noise_angles is None:
        return None
    noise_angles = np.asarray(noise_angles, dtype=np.float64)
    q = spec.n_bits
    if noise_angles.shape != (q, q):
        raise ValueError(f"noise_angles must have shape ({q}, {q})")
    return np.where(spec.controlled_mask(), noise_angles, 0.0)


def sum_amplitudes(
    js: np.ndarray,
    r: int,
    spec: AqftSpec,
    noise_angles: np.ndarray | None = None,
) -> np.ndarray:
    """sum_{p=0}^{M-1} exp(i phi(j, p r)) for each j, M = floor(2^(2L)/r).

    Vectorized two-stage evaluation: psi = bits(j) @ W gives the per-output-bit
    partial sums, then the phase matrix is one GEMM against the bits of p*r.
    Processed in column chunks to bound memory.
    """
    if not 2 <= r < (1 << spec.L):
        raise ValueError(f"r must be in [2, 2^L), got {r}")
    js = np.asarray(js, dtype=np.int64)
    q = spec.n_bits
    m_terms = spec.size // r
    if noise_angles is None and spec.d_keep_max == q - 1:
        # Complete window: phi(j, pr) = 2 pi (j r mod 2^(2L)) p / 2^(2L), so the
        # p-sum is a plain geometric series.  Both x and x*M are reduced mod
        # 2^(2L) in integer arithmetic (uint64 wraparound is exact here since
        # 2^(2L) divides 2^64) before any angle touches floating point.
        mask = np.uint64(spec.size - 1)
        x = (js.astype(np.uint64) * np.uint64(r)) & mask
        x_top = (x * np.uint64(m_terms)) & mask
        scale = TWO_PI / spec.size
        out = np.full(js.shape[0], float(m_terms), dtype=np.complex128)
        off = x != 0
        num = 1.0 - np.exp(1j * (scale * x_top[off]))
        den = 1.0 - np.exp(1j * (scale * x[off]))
        out[off] = num / den
        return out
    w = spec.weight_matrix()
    masked = _masked_noise(spec, noise_angles)
    if masked is not None:
        w = w + masked
    bits_k = _bit_matrix(np.arange(m_terms, dtype=np.uint64) * np.uint64(r), q)  # (M, 2L)
    out = np.empty(js.shape[0], dtype=np.complex128)
    chunk = max(16, min(8192, (1 << 23) // max(1, m_terms)))
    for start in range(0, js.shape[0], chunk):
        sel = js[start : start + chunk]
        psi = _bit_matrix(sel, q) @ w  # (C, 2L); psi[c, n] = sum_m [j]_m W[m, n]
        theta = bits_k @ psi.T  # (M, C)
        out[start : start + chunk] = np.cos(theta).sum(axis=0) + 1j * np.sin(theta).sum(axis=0)
    return out


def prob_j(
    j: int,
    r: int,
    spec: AqftSpec,
    noise_angles: np.ndarray | None = None,
) -> float:
    """Probability of measuring j after period finding with period r."""
    _check_jk(j, spec, "j")
    amp = sum_amplitudes(np.array([j], dtype=np.int64), r, spec, noise_angles)[0]
    return float(abs(amp) ** 2) * r / float(spec.size) ** 2


def prob_j_reference(
    j: int,
    r: int,
    spec: AqftSpec,
    noise_angles: np.ndarray | None = None,
) -> float:
    """Naive per-term evaluation of prob_j through aqft_phase; O(L^2) per term.

    Kept deliberately independent of the vectorized path for differential
    testing.
    """
    _check_jk(j, spec, "j")
    if not 2 <= r < (1 << spec.L):
        raise ValueError(f"r must be in [2, 2^L), got {r}")
    m_terms = spec.size // r
    total = 0j
    for p in range(m_terms):
        total += np.exp(1j * aqft_phase(j, p * r, spec, noise_angles))
    return float(abs(total) ** 2) * r / float(spec.size) ** 2


def useful_j_set(r: int, L: int) -> np.ndarray:
    """Sorted outcomes floor(c 2^(2L)/r) and ceil(c 2^(2L)/r) for 0 < c < r.

    These are the outcomes whose continued-fraction convergents are guaranteed
    to include a divisor of r.
    """
    if not 2 <= r < (1 << L):
        raise ValueError(f"r must be in [2, 2^L), got {r}")
    size = 1 << (2 * L)
    c = np.arange(1, r, dtype=np.int64)
    floors = c * size // r
    ceils = floors + ((c * size) % r != 0)
    return np.unique(np.concatenate([floors, ceils]))


def prob_useful(r: int, spec: AqftSpec, noise_angles: np.ndarray | None = None) -> float:
    """Probability s that a single run yields a useful outcome.

    Summation over the useful set in ascending j order (numpy pairwise sum),
    so the value does not depend on any worker count.
    """
    js = useful_j_set(r, spec.L)
    amps = sum_amplitudes(js, r, spec, noise_angles)
    probs = (amps.real**2 + amps.imag**2) * (r / float(spec.size) ** 2)
    return float(probs.sum())


def _map_trials(fn, trials: int, threads: int | None) -> np.ndarray:
    """Evaluate fn(trial) for every trial index; order-stable under threading."""
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(threads, trials)) as pool:
            return np.array(list(pool.map(fn, range(trials))))
    return np.array([fn(trial) for trial in range(trials)])


def prob_useful_noisy(
    r: int, spec: AqftSpec, noise: NoiseModel, threads: int | None = None
) -> NoisyEstimate:
    """Mean and standard error of s over independent noisy-gate trials.

    Each trial draws one Gaussian angle offset per kept controlled gate
    (pairs with m + n <= 2L - 2; the Hadamard diagonal stays exact) and the
    same draws apply to every outcome within the trial.  sigma = 0 returns
    the noiseless value exactly.  Trials are indexed, so the estimate is
    bit-identical for any thread count.
    """
    if noise.sigma == 0.0:
        return NoisyEstimate(prob_useful(r, spec), 0.0)
    values = _map_trials(
        lambda trial: prob_useful(r, spec, noise.draw(spec, trial)), noise.trials, threads
    )
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(noise.trials)) if noise.trials > 1 else 0.0
    return NoisyEstimate(mean, stderr)


def full_distribution(
    r: int,
    spec: AqftSpec,
    noise: NoiseModel | None = None,
) -> Distribution:
    """Probabilities of every outcome j; guarded at 2L <= 24 (dense array).

    With a NoiseModel the returned probabilities are the per-trial mean; the
    total mass r floor(2^(2L)/r)/2^(2L) is preserved trial by trial because
    angle offsets keep the transform unitary.
    """
    if spec.n_bits > 24:
        raise ValueError("full distribution limited to 2L <= 24; use prob_useful for larger L")
    if not 2 <= r < (1 << spec.L):
        raise ValueError(f"r must be in [2, 2^L), got {r}")
    js = np.arange(spec.size, dtype=np.int64)
    scale = r / float(spec.size) ** 2

    def one(delta):
        amps = sum_amplitudes(js, r, spec, delta)
        return (amps.real**2 + amps.imag**2) * scale

    if noise is None or noise.sigma == 0.0:
        probs = one(None)
        sigma, seed = (0.0, None) if noise is None else (noise.sigma, noise.seed)
    else:
        probs = np.zeros(spec.size, dtype=np.float64)
        per_trial = np.empty((noise.trials, spec.size), dtype=np.float64)
        for trial in range(noise.trials):
            per_trial[trial] = one(noise.draw(spec, trial))
        probs = per_trial.mean(axis=0)
        sigma, seed = noise.sigma, noise.seed
    return Distribution(
        L=spec.L, r=r, d_max=spec.d_max, variant=spec.variant,
        probabilities=probs, sigma=sigma, seed=seed,
    )
