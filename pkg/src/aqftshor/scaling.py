"""Sweep of the useful-output probability over (L, d_max), exponential-decay
fits, and the register-length/rotation-cutoff trade-off calculator.

Each (L, d_max) pair is characterized by s at the period r = 2^(L-1) + 2,
the minimum of the s-versus-r curve just right of its central peak.  Fitting
log2 s against L over a tail window gives the decay constant t in
s ~ c * 2^(-L/t); t grows by roughly a factor of 4 per unit of d_max, which
is what makes coarse rotation sets viable: a register of length up to about
4^(d_max-1) * log2(f_max) stays factorable within f_max repetitions.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .qpf import AqftSpec, prob_useful


def characteristic_r(L: int) -> int:
    """The period 2^(L-1) + 2 used to characterize a register length."""
    return (1 << (L - 1)) + 2


@dataclass(frozen=True)
class ScalingPoint:
    L: int
    d_max: int
    r: int
    s: float
    seconds: float
    variant: str = "physical"


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of log2 s = log2 c - L / t over a tail window."""

    d_max: int
    t: float
    c: float
    rms: float
    window: tuple[int, int]
    n_points: int

    def to_dict(self) -> dict:
        return {
            "d_max": self.d_max,
            "t": self.t,
            "c": self.c,
            "rms": self.rms,
            "window": list(self.window),
            "n_points": self.n_points,
        }


def _cache_path(cache_dir, L, d_max, variant):
    return os.path.join(cache_dir, f"point_L{L}_d{d_max}_{variant}.json")


def _atomic_write_json(path: str, payload: dict) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def compute_point(L: int, d_max: int, variant: str = "physical", cache_dir: str | None = None) -> ScalingPoint:
    """One grid point, served from the cache when present.

    Cached values are stored with full float precision (repr round-trip), so
    a cache hit reproduces the original bytes and a recomputation agrees to
    the last digit.
    """
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = _cache_path(cache_dir, L, d_max, variant)
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            return ScalingPoint(**data)
    r = characteristic_r(L)
    start = time.perf_counter()
    s = prob_useful(r, AqftSpec(L, d_max, variant))
    point = ScalingPoint(L=L, d_max=d_max, r=r, s=s, seconds=time.perf_counter() - start, variant=variant)
    if cache_dir:
        _atomic_write_json(path, point.__dict__)
    return point


def sweep(
    L_values,
    d_max_values,
    variant: str = "physical",
    cache_dir: str | None = None,
    threads: int | None = None,
) -> list[ScalingPoint]:
    """Complete (L, d_max) grid, sorted by (d_max, L).

    Points are independent and evaluated concurrently; the result order (and
    every value) is independent of the worker count.
    """
    grid = sorted((d, L) for L in L_values for d in d_max_values)
    workers = threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=min(workers, max(1, len(grid)))) as pool:
        points = list(pool.map(lambda dl: compute_point(dl[1], dl[0], variant, cache_dir), grid))
    return points


def write_sweep_csv(points, path) -> None:
    with open(path, "w") as fh:
        fh.write("L,d_max,r,s,seconds\n")
        for p in sorted(points, key=lambda p: (p.d_max, p.L)):
            fh.write(f"{p.L},{p.d_max},{p.r},{p.s!r},{p.seconds!r}\n")


def read_sweep_csv(path) -> list[ScalingPoint]:
    points = []
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("L,"):
            raise ValueError(f"{path} is not a sweep CSV")
        for line in fh:
            if not line.strip():
                continue
            L, d_max, r, s, seconds = line.split(",")
            points.append(ScalingPoint(int(L), int(d_max), int(r), float(s), float(seconds)))
    return points


def fit_decay(points, tail_fraction: float = 0.5) -> ScalingFit:
    """Fit s ~ c 2^(-L/t) on the largest ceil(tail_fraction * n) L values.

    All points must share one d_max and have s > 0 inside the window.  Data
    with nonnegative slope in log2 s (no decay) is reported with t = inf.
    """
    points = sorted(points, key=lambda p: p.L)
    d_values = {p.d_max for p in points}
    if len(d_values) != 1:
        raise ValueError(f"fit_decay wants a single d_max, got {sorted(d_values)}")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must be in (0, 1]")
    n_tail = math.ceil(tail_fraction * len(points))
    window = points[len(points) - n_tail :]
    if len(window) < 4:
        raise ValueError(f"need >= 4 points in the tail window, got {len(window)}")
    if any(p.s <= 0 for p in window):
        raise ValueError("nonpositive s inside the fit window")
    ls = np.array([p.L for p in window], dtype=float)
    ys = np.log2([p.s for p in window])
    slope, intercept = np.polyfit(ls, ys, 1)
    resid = ys - (slope * ls + intercept)
    rms = float(np.sqrt(np.mean(resid**2)))
    t = math.inf if slope >= 0 else -1.0 / slope
    return ScalingFit(
        d_max=d_values.pop(), t=float(t), c=float(2.0**intercept), rms=rms,
        window=(window[0].L, window[-1].L), n_points=len(window),
    )


def factor4_check(fits, threshold: float = 3.5) -> list[dict]:
    """Ratios t(d_max+1) / t(d_max) for consecutive fits with d_max >= 1.

    The d_max = 0 series is excluded: the factor-4 growth law only applies to
    positive cutoffs.  Raises when no consecutive pair exists.
    """
    by_d = {f.d_max: f for f in fits if f.d_max >= 1}
    pairs = [(d, d + 1) for d in sorted(by_d) if d + 1 in by_d]
    if not pairs:
        raise ValueError("need fits for at least two consecutive d_max >= 1")
    rows = []
    for d_lo, d_hi in pairs:
        ratio = by_d[d_hi].t / by_d[d_lo].t
        rows.append(
            {
                "d_max_from": d_lo,
                "d_max_to": d_hi,
                "t_from": by_d[d_lo].t,
                "t_to": by_d[d_hi].t,
                "ratio": ratio,
                "passed": bool(ratio >= threshold),
            }
        )
    return rows


def lmax(d_max: int, f_max: float) -> int:
    """Largest register length factorable within f_max repetitions:
    floor(4^(d_max-1) * log2 f_max)."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if f_max <= 1:
        raise ValueError("f_max must be > 1")
    return math.floor(4 ** (d_max - 1) * math.log2(f_max))


def invert_lmax(L: int, f_max: float, d_cap: int = 64) -> int:
    """Smallest d_max whose lmax reaches L."""
    if L < 1:
        raise ValueError("L must be >= 1")
    for d in range(1, d_cap + 1):
        if lmax(d, f_max) >= L:
            return d
    raise ValueError(f"no d_max <= {d_cap} reaches L = {L}")
