"""Fibonacci lengths, the Fibonacci word, a quasiperiodic signal and
quasiperiodic partitions of a time interval."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GOLDEN_RATIO",
    "FibonacciLengths",
    "FibonacciWord",
    "QuasiperiodicSignal",
    "TimePartition",
    "custom_partition",
    "fibonacci_lengths",
    "fibonacci_word",
    "quasiperiodic_partition",
    "signal_eval",
    "uniform_partition",
]

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

# l_92 is the last Fibonacci number below 2**63.
MAX_LENGTH_INDEX = 92
# word(g) has l_{g+1} symbols; keep words below ~100M characters.
MAX_WORD_GENERATION = 40


@dataclass(frozen=True)
class FibonacciLengths:
    """Step lengths ``l_0 = 0, l_1 = 1, l_{n+1} = l_n + l_{n-1}``."""

    values: tuple[int, ...]

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def schedule(self, n_steps: int) -> tuple[int, ...]:
        """Lengths used by steps ``1..n_steps`` (step ``k`` has length ``l_k``)."""
        if n_steps > self.n_max:
            raise IndexError(f"need lengths up to l_{n_steps}, have up to l_{self.n_max}")
        return self.values[1:n_steps + 1]


def fibonacci_lengths(n_max: int) -> FibonacciLengths:
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if n_max > MAX_LENGTH_INDEX:
        raise OverflowError(f"l_{n_max} does not fit in a signed 64-bit integer (max index {MAX_LENGTH_INDEX})")
    vals = [0, 1]
    while len(vals) <= n_max:
        vals.append(vals[-1] + vals[-2])
    return FibonacciLengths(tuple(vals[:n_max + 1]))


@dataclass(frozen=True)
class FibonacciWord:
    symbols: str
    generation: int

    def __len__(self):
        return len(self.symbols)

    def count(self, symbol: str) -> int:
        return self.symbols.count(symbol)


_SUBSTITUTION = str.maketrans({"A": "AB", "B": "A"})


def fibonacci_word(generation: int) -> FibonacciWord:
    """Word obtained from ``"A"`` by ``generation - 1`` substitutions A->AB, B->A."""
    if generation < 1:
        raise ValueError("generation must be >= 1")
    if generation > MAX_WORD_GENERATION:
        raise OverflowError(f"word of generation {generation} exceeds the memory budget "
                            f"(max generation {MAX_WORD_GENERATION})")
    w = "A"
    for _ in range(generation - 1):
        w = w.translate(_SUBSTITUTION)
    return FibonacciWord(w, generation)


@dataclass(frozen=True)
class QuasiperiodicSignal:
    """``x(tau) = cos(2 pi tau) + cos(2 pi alpha tau)``."""

    alpha: float = GOLDEN_RATIO

    def __call__(self, tau):
        return signal_eval(self, tau)


def signal_eval(signal: QuasiperiodicSignal, tau):
    tau = np.asarray(tau, dtype=float)
    out = np.cos(2.0 * np.pi * tau) + np.cos(2.0 * np.pi * signal.alpha * tau)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class TimePartition:
    """Strictly increasing times ``0 = t_0 < ... < t_N = t_total``."""

    times: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a partition needs at least two times")
        if t[0] != 0.0:
            raise ValueError(f"partition must start at 0, got {t[0]}")
        if not np.all(np.diff(t) > 0):
            raise ValueError("partition times must be strictly increasing")
        if self.kind not in ("uniform", "fibonacci_word", "custom"):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @property
    def t_total(self) -> float:
        return float(self.times[-1])

    @property
    def n_segments(self) -> int:
        return self.times.size - 1

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.times)

    def __eq__(self, other):
        return (isinstance(other, TimePartition) and self.kind == other.kind
                and np.array_equal(self.times, other.times))

    def __repr__(self):
        return f"TimePartition(times={self.times.tolist()}, kind={self.kind!r})"


def uniform_partition(t_total: float, n_segments: int) -> TimePartition:
    if not t_total > 0 or n_segments < 1:
        raise ValueError("need t_total > 0 and n_segments >= 1")
    t = t_total * np.arange(n_segments + 1) / n_segments
    t[-1] = t_total
    return TimePartition(t, "uniform")


def custom_partition(times) -> TimePartition:
    return TimePartition(np.asarray(times, dtype=float), "custom")


def quasiperiodic_partition(t_total: float, n_segments: int, source: FibonacciWord) -> TimePartition:
    """Partition of ``[0, t_total]`` whose durations follow the word's letters.

    ``A`` stands for a long interval (``phi``) and ``B`` for a short one
    (``1``); the first ``n_segments`` letters are rescaled so the durations
    add up to ``t_total``.
    """
    if not t_total > 0 or n_segments < 1:
        raise ValueError("need t_total > 0 and n_segments >= 1")
    if n_segments > len(source):
        raise ValueError(f"word of length {len(source)} is too short for {n_segments} segments")
    letters = np.frombuffer(source.symbols[:n_segments].encode("ascii"), dtype=np.uint8)
    raw = np.where(letters == ord("A"), GOLDEN_RATIO, 1.0)
    cum = np.concatenate(([0.0], np.cumsum(raw)))
    t = t_total * (cum / cum[-1])
    t[-1] = t_total
    return TimePartition(t, "fibonacci_word")
