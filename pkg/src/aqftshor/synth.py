"""Search for short fault-tolerant gate words approximating rotation targets.

Words are enumerated in the canonical form of ``su2.GateWord``: no adjacent
self-inverse pair, and every run of diagonal gates spelled in its fixed
shortest form.  Two alphabets are supported:

* "full"        -- all seven generators {H, S, s, T, t, X, Z};
* "alternating" -- strict alternation of H with T or T†, the shape the short
                   rotation approximations take in practice.  Its levels are
                   tiny (2^(n/2) words of length n), which makes scans to
                   length ~46 cheap.

The exhaustive strategy enumerates canonical words level by level with all
matrices held in vectorized batches.  The meet-in-the-middle strategy splits
a length n as ceil(n/2) + floor(n/2), indexes the right halves by their
global-phase-stripped quaternion coordinates in a KD-tree, and joins halves
through exact ball queries: dist(AB, T) = dist(B, A†T), and the squared
Euclidean gap between sign-resolved quaternions is 2 dist^2, so a query of
radius sqrt(2) * bound + rho cannot miss any pair beating the bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .su2 import GATES, GateWord, IDENTITY2, dist, rotation

ALPHABETS = ("full", "alternating")
STRATEGIES = ("exhaustive", "meet_in_middle")

_LABELS = ("H", "S", "T", "X", "Z", "s", "t")  # ASCII order: ties resolve lexicographically
#: successor labels keyed by the previous label (None = word start)
_NEXT_FULL = {
    None: _LABELS,
    "H": ("S", "T", "X", "Z", "s", "t"),
    "X": ("H", "S", "T", "Z", "s", "t"),
    "S": ("H", "T", "X"),  # S extends only into the canonical run "ST"
    "Z": ("H", "T", "X"),  # likewise "ZT"
    "T": ("H", "X"),
    "s": ("H", "X"),
    "t": ("H", "X"),
}
_NEXT_ALTERNATING = {
    None: ("H", "T", "t"),
    "H": ("T", "t"),
    "T": ("H",),
    "t": ("H",),
}

# full-alphabet levels grow ~3.9^n; a level of length 12 is ~10^7 matrices
# (0.7 GB), which is where batch enumeration stops making sense
_MAX_LEVEL_WORDS = 12_000_000


class _Levels:
    """Level-by-level enumeration of canonical words, vectorized and cached.

    Level n holds every canonical word of exactly n labels: its matrix, the
    index of its length-(n-1) parent and the appended label, so any word is
    recovered by walking parents back to the root.
    """

    def __init__(self, alphabet: str):
        if alphabet not in ALPHABETS:
            raise ValueError(f"alphabet must be one of {ALPHABETS}")
        self.table = _NEXT_FULL if alphabet == "full" else _NEXT_ALTERNATING
        labels = sorted({g for succ in self.table.values() for g in succ})
        self._states: list[str | None] = [None] + labels
        self._index = {s: i for i, s in enumerate(self._states)}
        self.levels = [
            (
                IDENTITY2[None, :, :].copy(),
                np.zeros(1, dtype=np.uint8),  # automaton state (0 = start)
                np.zeros(1, dtype=np.int64),  # parent index
                np.zeros(1, dtype=np.uint8),  # appended label index
            )
        ]

    def level(self, n: int):
        while len(self.levels) <= n:
            mats, states, _, _ = self.levels[-1]
            parts = []
            for si, state in enumerate(self._states):
                mask = states == si
                if not mask.any():
                    continue
                idx = np.flatnonzero(mask)
                for g in self.table.get(state, ()):
                    parts.append(
                        (
                            mats[idx] @ GATES[g],
                            np.full(len(idx), self._index[g], dtype=np.uint8),
                            idx.astype(np.int64),
                            np.full(len(idx), self._index[g], dtype=np.uint8),
                        )
                    )
            if not parts:
                empty = np.empty(0)
                self.levels.append((empty.reshape(0, 2, 2), empty, empty, empty))
                continue
            new = tuple(np.concatenate([p[i] for p in parts]) for i in range(4))
            if len(new[0]) > _MAX_LEVEL_WORDS:
                raise ValueError(
                    f"level {len(self.levels)} holds {len(new[0])} canonical words, "
                    "beyond the batch enumeration budget"
                )
            self.levels.append(new)
        return self.levels[n]

    def word(self, n: int, i: int) -> str:
        """Reconstruct the word at (level, index) by walking parent pointers."""
        out = []
        for lvl in range(n, 0, -1):
            _, _, parents, labels = self.levels[lvl]
            out.append(self._states[labels[i]])
            i = int(parents[i])
        return "".join(reversed(out))


def distances_to(target: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Vectorized dist(target, mats[i]) via tr(U†V) = sum conj(U) * V."""
    tr = np.abs(np.einsum("ij,nij->n", target.conj(), mats))
    return np.sqrt(np.maximum(0.0, (2.0 - tr) / 2.0))


def quaternions(mats: np.ndarray) -> np.ndarray:
    """Global-phase-stripped SU(2) coordinates (Re a, Im a, Re b, Im b).

    The overall sign is a leftover gauge, so q and -q name the same unitary;
    |dot(q1, q2)| = |tr(U1†U2)| / 2, hence the sign-resolved Euclidean gap
    satisfies min_± ||q1 ∓ q2||^2 = 2 dist(U1, U2)^2.
    """
    det = mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]
    phase = np.sqrt(det)
    a = mats[:, 0, 0] / phase
    b = mats[:, 0, 1] / phase
    return np.stack([a.real, a.imag, b.real, b.imag], axis=1)


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one synthesis run.

    epsilon is the distance at which the search may stop early (it finishes
    the length the hit occurred at); resolution pads the KD-tree query radius
    and defaults to epsilon / 4.
    """

    target: np.ndarray
    max_length: int
    strategy: str = "exhaustive"
    epsilon: float = 1e-4
    alphabet: str = "full"
    resolution: float | None = None

    def __post_init__(self):
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.alphabet not in ALPHABETS:
            raise ValueError(f"alphabet must be one of {ALPHABETS}")

    @property
    def rho(self) -> float:
        return self.epsilon / 4.0 if self.resolution is None else self.resolution


@dataclass
class SynthResult:
    """Best word found; the empty word (= identity) when nothing beat it."""

    word: GateWord
    achieved: float
    explored: int
    seconds: float
    identity_optimal: bool = False

    def to_dict(self) -> dict:
        return {
            "word": str(self.word),
            "length": len(self.word),
            "achieved": self.achieved,
            "explored": self.explored,
            "seconds": self.seconds,
            "identity_optimal": self.identity_optimal,
        }


def baseline_distance(target: np.ndarray) -> float:
    """How well doing nothing approximates the target."""
    return dist(target, IDENTITY2)


class _Best:
    """Strictly-better-than-identity tracker with lexicographic tie-breaks."""

    def __init__(self, baseline: float):
        self.dist = baseline
        self.word: str | None = None

    def offer(self, d: float, word: str) -> None:
        if d < self.dist or (d == self.dist and self.word is not None and word < self.word):
            self.dist = d
            self.word = word


def _exhaustive(cfg: SearchConfig, best: _Best, levels: _Levels) -> int:
    explored = 0
    for n in range(1, cfg.max_length + 1):
        mats, _, _, _ = levels.level(n)
        if len(mats) == 0:
            break
        explored += len(mats)
        ds = distances_to(cfg.target, mats)
        floor = float(ds.min())
        if floor <= best.dist:
            for k in np.flatnonzero(ds == floor):
                best.offer(floor, levels.word(n, int(k)))
        if best.dist <= cfg.epsilon:
            break
    return explored


def _mitm(cfg: SearchConfig, best: _Best, levels: _Levels) -> int:
    explored = 0
    target = cfg.target
    trees: dict[int, tuple] = {}

    def half(nb: int):
        if nb not in trees:
            mats, _, _, _ = levels.level(nb)
            qs = quaternions(mats)
            trees[nb] = (mats, cKDTree(np.concatenate([qs, -qs])), len(mats))
        return trees[nb]

    for n in range(1, cfg.max_length + 1):
        na = (n + 1) // 2
        nb = n - na
        mats_a, _, _, _ = levels.level(na)
        if len(mats_a) == 0:
            break
        if nb == 0:
            explored += len(mats_a)
            ds = distances_to(target, mats_a)
            floor = float(ds.min())
            if floor <= best.dist:
                for k in np.flatnonzero(ds == floor):
                    best.offer(floor, levels.word(na, int(k)))
        else:
            mats_b, tree, n_b = half(nb)
            needed = np.einsum("nji,jk->nik", mats_a.conj(), target)  # A† target
            radius = math.sqrt(2.0) * best.dist + cfg.rho
            hits = tree.query_ball_point(quaternions(needed), r=radius)
            for ia, cand in enumerate(hits):
                if not cand:
                    continue
                ib = np.unique(np.asarray(cand, dtype=np.int64) % n_b)  # fold signs
                prods = mats_a[ia] @ mats_b[ib]
                ds = distances_to(target, prods)
                explored += len(ib)
                for k in range(len(ib)):
                    if ds[k] <= best.dist:
                        joined = levels.word(na, ia) + levels.word(nb, int(ib[k]))
                        canon = str(GateWord.from_string(joined).canonical())
                        best.offer(float(ds[k]), canon)
        if best.dist <= cfg.epsilon:
            break
    return explored


def search(config: SearchConfig) -> SynthResult:
    """Find the best canonical word of length <= max_length for the target.

    Lengths are scanned in increasing order; the scan stops early once the
    epsilon goal is met.  Ties on distance resolve to the lexicographically
    smallest serialized word.  When nothing beats the identity baseline the
    result says so explicitly and carries the empty word.
    """
    start = time.perf_counter()
    levels = _Levels(config.alphabet)
    best = _Best(baseline_distance(config.target))
    runner = _exhaustive if config.strategy == "exhaustive" else _mitm
    explored = runner(config, best, levels)
    seconds = time.perf_counter() - start
    if best.word is None:
        return SynthResult(GateWord(), best.dist, explored, seconds, identity_optimal=True)
    return SynthResult(GateWord.from_string(best.word), best.dist, explored, seconds)


@dataclass(frozen=True)
class GateCountRow:
    d: int
    epsilon: float
    length: int | None  # None when the budget ran out; budget is a lower bound
    achieved: float
    word: str
    budget: int

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "epsilon": self.epsilon,
            "length": self.length,
            "achieved": self.achieved,
            "word": self.word,
            "budget": self.budget,
        }


def gate_count_scaling_report(
    d_range,
    budget: int = 14,
    strategy: str = "meet_in_middle",
    alphabet: str = "full",
) -> list[GateCountRow]:
    """Shortest word reaching dist <= 2^-d to the pi/2^d rotation, per d.

    Rows whose search budget ran out report length None together with the
    best distance the budget did reach.
    """
    rows = []
    for d in d_range:
        target = rotation(d)
        eps = 2.0**-d
        result = search(SearchConfig(target, budget, strategy, eps, alphabet))
        ok = result.achieved <= eps and not result.identity_optimal
        rows.append(
            GateCountRow(
                d=d, epsilon=eps,
                length=len(result.word) if ok else None,
                achieved=result.achieved,
                word=str(result.word), budget=budget,
            )
        )
    return rows
