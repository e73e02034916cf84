"""2x2 unitary arithmetic for the fault-tolerant gate set {H, S, S†, T, T†, X, Z}.

Gate words are written as compact strings over the alphabet ``HSsTtXZ`` where
lowercase ``s`` and ``t`` denote the adjoints of S and T.  The empty word is
the identity.  ``eval_word`` multiplies the generator matrices left to right,
so the leftmost label is the leftmost matrix factor.  Every generator here is
a symmetric matrix, which makes the reversed-order product the transpose of
the forward one; since ``dist`` only ever sees |tr(U†V)|, both reading
conventions give identical distances to any diagonal rotation target.  A
regression test pins the convention through the bundled 31-gate word below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

LABELS = "HSsTtXZ"

_SQRT2 = math.sqrt(2.0)

GATES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    "S": np.diag([1.0 + 0j, 1j]),
    "s": np.diag([1.0 + 0j, -1j]),
    "T": np.diag([1.0 + 0j, np.exp(1j * np.pi / 4)]),
    "t": np.diag([1.0 + 0j, np.exp(-1j * np.pi / 4)]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.diag([1.0 + 0j, -1.0 + 0j]),
}

IDENTITY2 = np.eye(2, dtype=complex)

#: Shortest known word over this gate set that beats the identity as an
#: approximation of the pi/128 rotation (31 gates, distance ~8.1e-3).
R128_WORD_31 = "HTHtHTHTHTHtHtHTHTHtHtHTHtHtHtH"

# Diagonal generators form the cyclic group generated by T: every run of
# adjacent diagonal gates collapses to diag(1, e^{i k pi/4}) for some k mod 8.
_DIAG_EXPONENT = {"T": 1, "S": 2, "Z": 4, "s": 6, "t": 7}
_DIAG_SPELLING = {
    1: ("T",),
    2: ("S",),
    3: ("S", "T"),
    4: ("Z",),
    5: ("Z", "T"),
    6: ("s",),
    7: ("t",),
}


@dataclass(frozen=True)
class GateWord:
    """An ordered sequence of generator labels."""

    labels: tuple[str, ...] = ()

    def __post_init__(self):
        bad = [g for g in self.labels if g not in GATES]
        if bad:
            raise ValueError(f"unknown gate labels {bad!r}; alphabet is {LABELS!r}")

    @classmethod
    def from_string(cls, text: str) -> "GateWord":
        return cls(tuple(text))

    def __str__(self) -> str:
        return "".join(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __add__(self, other: "GateWord") -> "GateWord":
        return GateWord(self.labels + other.labels)

    def matrix(self) -> np.ndarray:
        return eval_word(self)

    def canonical(self) -> "GateWord":
        """Reduce with the rewrite rules until no adjacent pair merges.

        Rules: H·H, X·X and any diagonal pair d·d† cancel; adjacent diagonal
        gates merge through the exponent arithmetic above (T·T -> S,
        S·S -> Z, Z·Z -> I, ...), and each merged run is respelled in the
        fixed shortest form of ``_DIAG_SPELLING``.  All rules preserve the
        matrix exactly, so ``canonical().matrix() == matrix()`` up to
        floating-point roundoff in the products.
        """
        stack: list = []  # entries: "H", "X", or int exponent mod 8
        for g in self.labels:
            e = _DIAG_EXPONENT.get(g)
            if e is not None:
                if stack and isinstance(stack[-1], int):
                    e = (stack.pop() + e) % 8
                if e:
                    stack.append(e)
            elif stack and stack[-1] == g:
                stack.pop()
            else:
                stack.append(g)
        out: list[str] = []
        for tok in stack:
            out.extend(_DIAG_SPELLING[tok] if isinstance(tok, int) else (tok,))
        return GateWord(tuple(out))

    @property
    def is_canonical(self) -> bool:
        return self.labels == self.canonical().labels


def eval_word(word) -> np.ndarray:
    """Product of generator matrices, leftmost label first.

    Accepts a GateWord, a string, or any iterable of labels.  The empty word
    evaluates to the identity, and eval_word(w1 + w2) equals
    eval_word(w1) @ eval_word(w2).
    """
    labels = word.labels if isinstance(word, GateWord) else tuple(word)
    return reduce(lambda acc, g: acc @ GATES[g], labels, IDENTITY2)


def dist(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-invariant distance sqrt((2 - |tr(u†v)|) / 2).

    Symmetric, satisfies the triangle inequality, and vanishes exactly when
    u and v agree up to a global phase.  Values lie in [0, 1].
    """
    overlap = abs(np.trace(u.conj().T @ v))
    return math.sqrt(max(0.0, (2.0 - overlap) / 2.0))


def rotation(d: int) -> np.ndarray:
    """Single-qubit rotation diag(1, e^{i pi / 2^d}); d=0 is Z, d=1 is S, d=2 is T."""
    if d < 0:
        raise ValueError("rotation exponent d must be >= 0")
    return np.diag([1.0 + 0j, np.exp(1j * np.pi / 2**d)])


def controlled_rotation_matrix(d: int) -> np.ndarray:
    """Two-qubit controlled rotation diag(1, 1, 1, e^{i pi / 2^d})."""
    if d < 0:
        raise ValueError("rotation exponent d must be >= 0")
    return np.diag([1.0 + 0j, 1.0, 1.0, np.exp(1j * np.pi / 2**d)])


@dataclass(frozen=True)
class CircuitGate:
    """One element of a two-qubit decomposition.

    name   -- "h", "phase" or "cnot"
    qubit  -- wire for single-qubit gates: 0 = control wire, 1 = target wire
    angle  -- phase angle for "phase" gates
    """

    name: str
    qubit: int | None = None
    angle: float | None = None

    def matrix(self) -> np.ndarray:
        if self.name == "h":
            return GATES["H"]
        if self.name == "phase":
            return np.diag([1.0 + 0j, np.exp(1j * self.angle)])
        if self.name == "cnot":
            return np.array(
                [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                dtype=complex,
            )
        raise ValueError(f"unknown gate {self.name!r}")


def two_qubit_matrix(gates) -> np.ndarray:
    """Compose a CircuitGate sequence (listed in application order) into a 4x4.

    Wire 0 is the control (high bit of the basis index), wire 1 the target.
    """
    eye = np.eye(2, dtype=complex)
    total = np.eye(4, dtype=complex)
    for g in gates:
        m = g.matrix()
        if m.shape == (2, 2):
            m = np.kron(m, eye) if g.qubit == 0 else np.kron(eye, m)
        total = m @ total
    return total


def decompose_controlled(d: int) -> list[CircuitGate]:
    """Decompose diag(1,1,1,e^{i pi/2^d}) into CNOTs and single-qubit gates.

    For d = 0 (controlled-Z) a single CNOT conjugated by Hadamards on the
    target suffices.  For d >= 1 the rotation angle pi/2^d is strictly below
    the entangling power of a CNOT, so one CNOT cannot reproduce it exactly;
    the standard two-CNOT form with three half-angle phase rotations is
    returned instead.  The product is exactly the controlled rotation (no
    global phase is introduced).
    """
    if d < 0:
        raise ValueError("rotation exponent d must be >= 0")
    if d == 0:
        return [CircuitGate("h", 1), CircuitGate("cnot"), CircuitGate("h", 1)]
    half = math.pi / 2 ** (d + 1)
    return [
        CircuitGate("phase", 1, half),
        CircuitGate("cnot"),
        CircuitGate("phase", 1, -half),
        CircuitGate("cnot"),
        CircuitGate("phase", 0, half),
    ]
