"""Classical side of the factoring loop: continued fractions, order recovery
from measured outcomes, and the end-to-end driver.

Everything here is exact integer arithmetic (Python ints), independent of the
floating-point guards of the distribution modules: outcomes j live in
[0, 2^(2L)) with L the bit length of N, and the continued-fraction expansion
of j / 2^(2L) is computed by the Euclidean algorithm.

Order recovery follows the usual two stages.  Each convergent denominator
d < 2^L is tested directly via m^d mod N; if none verifies, every pair of
convergents with coprime numerators is combined through lcm(d, d') and tested
the same way.  The smallest verified candidate is returned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .oracle import multiplicative_order, qpf_distribution_exact
from .qpf import AqftSpec, Distribution, full_distribution

SAMPLE_SOURCES = ("formula-sampled", "oracle-sampled", "injected")


@dataclass(frozen=True)
class CfExpansion:
    """Continued fraction of numerator/denominator in [0, 1).

    quotients are the partial denominators (the expansion is the list
    {a1, a2, ...} of 1/(a1 + 1/(a2 + ...))); convergents are the reduced
    fractions (c_n, d_n) obtained by truncating after n quotients.
    """

    numerator: int
    denominator: int
    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]


def cf_expand(numerator: int, denominator: int) -> CfExpansion:
    """Exact continued-fraction expansion of numerator/denominator.

    Requires 0 <= numerator < denominator.  The convergents follow the
    standard recurrence h_n = a_n h_{n-1} + h_{n-2} and are automatically in
    lowest terms; the final convergent is the input fraction reduced.
    """
    if denominator < 1:
        raise ValueError("denominator must be >= 1")
    if not 0 <= numerator < denominator:
        raise ValueError("need 0 <= numerator < denominator")
    quotients: list[int] = []
    convergents: list[tuple[int, int]] = []
    p_prev, p_cur = 1, 0  # numerators h_{-1}, h_0
    q_prev, q_cur = 0, 1  # denominators
    a, b = denominator, numerator
    while b:
        quot, rem = divmod(a, b)
        quotients.append(quot)
        p_prev, p_cur = p_cur, quot * p_cur + p_prev
        q_prev, q_cur = q_cur, quot * q_cur + q_prev
        convergents.append((p_cur, q_cur))
        a, b = b, rem
    return CfExpansion(numerator, denominator, tuple(quotients), tuple(convergents))


@dataclass(frozen=True)
class QpfSample:
    """One measured outcome j together with where it came from."""

    j: int
    source: str = "injected"

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("j must be >= 0")
        if self.source not in SAMPLE_SOURCES:
            raise ValueError(f"source must be one of {SAMPLE_SOURCES}")


def _sample_js(samples: Iterable) -> list[int]:
    return [s.j if isinstance(s, QpfSample) else int(s) for s in samples]


def find_order(m: int, N: int, samples: Iterable) -> int | None:
    """Recover the multiplicative order of m mod N from measured outcomes.

    samples may be ints or QpfSamples holding j in [0, 2^(2L)).  Convergents
    of every j / 2^(2L) are pooled; denominators below 2^L are tested
    directly, then lcm's of coprime-numerator pairs.  Returns the smallest
    candidate d with m^d = 1 mod N, or None.
    """
    if math.gcd(m, N) != 1:
        raise ValueError(f"gcd({m}, {N}) != 1")
    L = N.bit_length()
    size = 1 << (2 * L)
    bound = 1 << L
    pool: list[tuple[int, int]] = []
    seen = set()
    for j in _sample_js(samples):
        if not 0 <= j < size:
            raise ValueError(f"sample j = {j} out of range [0, {size})")
        for c, d in cf_expand(j, size).convergents:
            if d < bound and (c, d) not in seen:
                seen.add((c, d))
                pool.append((c, d))
    verified = set()
    for _, d in pool:
        if d > 1 and pow(m, d, N) == 1:
            verified.add(d)
    for i, (c1, d1) in enumerate(pool):
        for c2, d2 in pool[i + 1 :]:
            if math.gcd(c1, c2) != 1:
                continue
            cand = math.lcm(d1, d2)
            if 1 < cand < bound and cand not in verified and pow(m, cand, N) == 1:
                verified.add(cand)
    return min(verified) if verified else None


def sample_outcome(dist: Distribution, rng: np.random.Generator, source: str = "injected") -> QpfSample:
    """Draw one outcome by inverse CDF.

    The residual mass 1 - sum(Pr) (the truncated partial-period tail) is
    assigned to a uniformly random outcome.
    """
    probs = dist.probabilities
    cum = np.cumsum(probs)
    total = float(cum[-1])
    if total <= 0.0:
        raise ValueError("distribution has no mass")
    u = rng.random()
    if u < total:
        j = int(np.searchsorted(cum, u, side="right"))
    else:
        j = int(rng.integers(dist.size))
    return QpfSample(j, source)


def _is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def trivial_factor(N: int) -> int | None:
    """A classically obvious factor of N, if the quantum loop is pointless.

    Returns 2 for even N and the base p for prime powers p^k; returns None
    for odd composites with at least two distinct prime factors.  Raises for
    primes and N < 4, which have no nontrivial factorization.
    """
    if N < 4:
        raise ValueError(f"{N} has no nontrivial factors")
    if N % 2 == 0:
        return 2
    if _is_probable_prime(N):
        raise ValueError(f"{N} is prime")
    for k in range(2, N.bit_length() + 1):
        root = round(N ** (1.0 / k))
        for p in (root - 1, root, root + 1):
            if p > 1 and p**k == N:
                return p
    return None


@dataclass(frozen=True)
class FactoringInstance:
    """An odd composite N (not a prime power) and an optional fixed base m.

    With m = None the driver draws bases at random.  A base sharing a factor
    with N short-circuits the quantum loop through the gcd branch.
    """

    N: int
    m: int | None = None

    def __post_init__(self):
        if trivial_factor(self.N) is not None:
            raise ValueError(f"N = {self.N} is even or a prime power; factor it classically")
        if self.m is not None and not 1 < self.m < self.N:
            raise ValueError("need 1 < m < N")

    @property
    def L(self) -> int:
        return self.N.bit_length()


@dataclass
class FactorReport:
    """Outcome of one end-to-end factoring run."""

    N: int
    success: bool
    factors: tuple[int, int] | None
    r: int | None
    m_tried: list[int]
    samples_used: int
    seconds: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "success": self.success,
            "factors": list(self.factors) if self.factors else None,
            "r": self.r,
            "m_tried": self.m_tried,
            "samples_used": self.samples_used,
            "seconds": self.seconds,
        }


def _build_sampler_distribution(N, m, sampler, d_max, variant):
    L = N.bit_length()
    d_max = 2 * L if d_max is None else d_max
    spec = AqftSpec(L, d_max, variant)
    if sampler == "formula":
        r = multiplicative_order(m, N)
        return full_distribution(r, spec), "formula-sampled"
    if sampler == "oracle":
        return qpf_distribution_exact(N, m, spec), "oracle-sampled"
    raise ValueError(f"unknown sampler {sampler!r}")


def shor_factor(
    instance: FactoringInstance,
    sampler="formula",
    f_max: int = 100,
    seed: int | None = None,
    d_max: int | None = None,
    variant: str = "physical",
    m_retries: int = 8,
) -> FactorReport:
    """Run the complete factoring loop against a simulated outcome source.

    sampler is "formula" (closed-form distribution), "oracle" (state-vector
    simulation) or a sequence of injected j values.  f_max bounds the total
    number of outcome draws across all bases.  A recovered order is rejected
    when it is odd or when m^(r/2) = +-1 mod N, in which case a fresh base is
    tried (up to m_retries).  All randomness flows from the single seed.
    """
    start = time.perf_counter()
    N = instance.N
    rng = np.random.default_rng(seed)
    injected = None
    if not isinstance(sampler, str):
        injected = [QpfSample(int(j), "injected") for j in sampler]
    m_tried: list[int] = []
    samples_used = 0

    def report(success, factors=None, r=None):
        return FactorReport(
            N=N, success=success, factors=factors, r=r, m_tried=m_tried,
            samples_used=samples_used, seconds=time.perf_counter() - start,
        )

    for attempt in range(m_retries):
        if instance.m is not None:
            if attempt > 0:
                break
            m = instance.m
        else:
            m = int(rng.integers(2, N - 1))
        m_tried.append(m)
        g = math.gcd(m, N)
        if g > 1:
            return report(True, (g, N // g))
        dist = None
        source = "injected"
        if injected is None:
            dist, source = _build_sampler_distribution(N, m, sampler, d_max, variant)
        samples: list[QpfSample] = []
        r = None
        while samples_used < f_max:
            if injected is not None:
                if samples_used >= len(injected):
                    break
                sample = injected[samples_used]
            else:
                sample = sample_outcome(dist, rng, source)
            samples_used += 1
            samples.append(sample)
            r = find_order(m, N, samples)
            if r is not None:
                break
        if r is None:
            if samples_used >= f_max:
                return report(False)
            continue  # injected samples exhausted for this base
        if r % 2 == 1:
            continue  # odd order: highly likely to fail, retry with a new base
        half = pow(m, r // 2, N)
        if half == 1 or half == N - 1:
            continue  # m^(r/2) = +-1: trivial gcds, retry with a new base
        f1, f2 = math.gcd(half - 1, N), math.gcd(half + 1, N)
        if f1 > 1 and f2 > 1 and f1 * f2 == N:
            return report(True, (min(f1, f2), max(f1, f2)), r)
    return report(False)
