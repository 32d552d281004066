"""Quadrature, finite differences and reproducible random streams.

Everything else in the package leans on these three pieces, so they are
kept small and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureError",
    "QuadratureSpec",
    "RandomStream",
    "central_difference",
    "integrate",
    "make_stream",
]

RULES = ("gauss_legendre", "trapezoid_periodic")
_U64 = 2**64


class QuadratureError(ArithmeticError):
    """Raised when an integrand is non-finite or a quadrature fails to settle."""


@dataclass(frozen=True)
class QuadratureSpec:
    """A fixed quadrature rule on a finite interval.

    Parameters
    ----------
    rule : {"gauss_legendre", "trapezoid_periodic"}
        ``trapezoid_periodic`` assumes the integrand has period ``b - a``
        and uses the equispaced left-endpoint rule.
    node_count : int
        Number of nodes, at least 2.
    interval : tuple of float
        ``(a, b)`` with ``a < b``.
    """

    rule: str = "gauss_legendre"
    node_count: int = 64
    interval: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown quadrature rule {self.rule!r}; expected one of {RULES}")
        if int(self.node_count) != self.node_count or self.node_count < 2:
            raise ValueError(f"node_count must be an integer >= 2, got {self.node_count}")
        a, b = self.interval
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"interval must satisfy a < b, got {self.interval}")

    def with_interval(self, a, b) -> "QuadratureSpec":
        return replace(self, interval=(float(a), float(b)))

    def nodes_weights(self):
        """Return ``(nodes, weights)`` mapped onto ``interval``."""
        a, b = self.interval
        n = int(self.node_count)
        if self.rule == "gauss_legendre":
            x, w = _leggauss(n)
            half = 0.5 * (b - a)
            return a + half * (x + 1.0), half * w
        h = (b - a) / n
        return a + h * np.arange(n), np.full(n, h)


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def _evaluate(f, x):
    try:
        vals = np.asarray(f(x))
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != x.shape:
        vals = np.array([f(xi) for xi in x])
    return vals


def integrate(f, spec: QuadratureSpec):
    """Apply the quadrature rule in ``spec`` to ``f``.

    ``f`` may be vectorised (called once with the node array) or scalar
    (called once per node). Complex-valued integrands are allowed and give
    a complex result.

    Raises
    ------
    QuadratureError
        If ``f`` is not finite at some node.
    """
    x, w = spec.nodes_weights()
    vals = _evaluate(f, x)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise QuadratureError(f"integrand is not finite at node {i} (x={x[i]!r}): {vals[i]!r}")
    total = np.dot(w, vals)
    return complex(total) if np.iscomplexobj(total) else float(total)


def central_difference(f, x: float, h: float | None = None) -> float:
    """Symmetric difference quotient ``(f(x+h) - f(x-h)) / 2h``.

    The default step ``1e-5 * max(1, |x|)`` balances truncation against
    round-off for double precision.
    """
    if h is None:
        h = 1e-5 * max(1.0, abs(x))
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    return (f(x + h) - f(x - h)) / (2.0 * h)


@dataclass(frozen=True)
class RandomStream:
    """Immutable descriptor of a reproducible random stream.

    The stream is identified by ``(master_seed, stream_index)`` plus an
    optional ``path`` of sub-stream counters. Every call to
    :meth:`generator` returns a fresh generator positioned at the start of
    the stream, so the descriptor itself never changes state.
    """

    master_seed: int
    stream_index: int = 0
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        for v in (self.master_seed, self.stream_index, *self.path):
            if int(v) != v or not 0 <= v < _U64:
                raise ValueError(f"seed components must be 64-bit unsigned integers, got {v!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.master_seed),
                                    spawn_key=(int(self.stream_index), *map(int, self.path)))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, k: int) -> "RandomStream":
        """Counter-indexed child stream; used to give each Monte Carlo chunk its own draws."""
        return RandomStream(self.master_seed, self.stream_index, (*self.path, int(k)))

    def uniform(self, size) -> np.ndarray:
        """First ``size`` uniform draws in [0, 1)."""
        return self.generator().random(size)

    def coins(self, size) -> np.ndarray:
        """First ``size`` fair-coin draws as 0/1 integers."""
        return self.generator().integers(0, 2, size=size)


def make_stream(master_seed: int, stream_index: int = 0) -> RandomStream:
    return RandomStream(master_seed, stream_index)
