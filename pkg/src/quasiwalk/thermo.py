"""Partition functions, energies and entropies for piecewise paths and for
the Fibonacci chain.

For a path with total variation ``L`` and length action ``beta * L``::

    Z = exp(-beta L),   E = -d ln Z / d beta = L,   S = E + ln Z = (1 - beta) L

``S = E + ln Z`` is the default; ``standard_entropy=True`` switches to the
usual ``S = beta E + ln Z``.

The chain partition function ``Z = sum_n Pr{X_n = l l_n}`` diverges as
``n_max`` grows (its terms decay like ``n**-1/2``), so the truncation is
always an explicit argument.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .heat import PiecewisePath
from .numerics import central_difference
from .quasiperiodic import FibonacciLengths
from .walk import _lattice_prob

__all__ = [
    "ChainThermoSpec",
    "ThermoReport",
    "chain_entropy",
    "chain_entropy_2d",
    "chain_partition_function",
    "chain_terms",
    "default_weight_F",
    "default_weight_G",
    "path_thermo",
]


@dataclass(frozen=True)
class ThermoReport:
    Z: float
    E: float
    S: float
    method: str
    log_Z: float

    def as_dict(self):
        return {"Z": self.Z, "E": self.E, "S": self.S, "log_Z": self.log_Z, "method": self.method}


def _total_variation(path: PiecewisePath) -> float:
    steps = np.diff(path.nodes, axis=0)
    return math.fsum(np.sqrt(np.sum(steps**2, axis=1)))


def path_thermo(path: PiecewisePath, beta_tilde: float, method: str = "closed_form",
                standard_entropy: bool = False, h: float | None = None) -> ThermoReport:
    """``(Z, E, S)`` of the length action ``beta_tilde * sum |x_i - x_{i-1}|``.

    ``method="finite_difference"`` takes ``E`` as a central difference of
    ``-ln Z`` in ``beta_tilde`` instead of the closed form.
    """
    L = _total_variation(path)

    def log_z(b):
        return -b * L

    lz = log_z(beta_tilde)
    if method == "closed_form":
        E = L
    elif method == "finite_difference":
        E = central_difference(lambda b: -log_z(b), beta_tilde, h)
    else:
        raise ValueError(f"unknown method {method!r}")
    S = (beta_tilde * E if standard_entropy else E) + lz
    return ThermoReport(math.exp(lz), E, S, method, lz)


def default_weight_F(ln):
    return 1.0 / ln


def default_weight_G(lnx, lny):
    return 1.0 / (lnx * lny)


@dataclass(frozen=True)
class ChainThermoSpec:
    """Inputs to the chain sums.

    ``l`` (and ``m`` in 2D) is the lattice multiplier of the target site,
    ``n_max`` the truncation of the sum over step counts. ``expectation``
    chooses how the bare ``<X_n>`` is read: ``"final"`` evaluates it at
    ``n = n_max``; ``"per_term"`` averages ``F(l_n) <X_n>`` over the terms
    with weights ``Pr_n / Z``.
    """

    l: int
    n_max: int
    weight_F: Callable = default_weight_F
    weight_G: Callable = default_weight_G
    m: int = 0
    expectation: str = "final"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.expectation not in ("final", "per_term"):
            raise ValueError(f"unknown expectation mode {self.expectation!r}")


def chain_terms(l: int, n_max: int) -> list[float]:
    """``Pr{X_n = l l_n}`` for ``n = 1..n_max``; zero where ``|l| > n``."""
    return [_lattice_prob(n, l) for n in range(1, n_max + 1)]


def chain_partition_function(spec: ChainThermoSpec) -> float:
    return math.fsum(chain_terms(spec.l, spec.n_max))


def _mean_multiplier(n):
    # sum_l l * P(n, l); paired as l * (P(l) - P(-l)) so a symmetric law gives exactly 0.
    return math.fsum(k * (_lattice_prob(n, k) - _lattice_prob(n, -k)) for k in range(1, n + 1))


def _chain_mean(n, ln):
    return ln * _mean_multiplier(n)


def chain_entropy(spec: ChainThermoSpec, lengths: FibonacciLengths) -> float:
    """``F(l_n) <X_n> + ln Z`` with ``<X_n> = sum_l (l l_n) Pr{X_n = l l_n}``."""
    if spec.n_max > lengths.n_max:
        raise IndexError(f"lengths stop at l_{lengths.n_max}, need l_{spec.n_max}")
    terms = chain_terms(spec.l, spec.n_max)
    Z = math.fsum(terms)
    if Z <= 0:
        raise ValueError(f"partition function vanishes for l={spec.l}, n_max={spec.n_max}; ln Z undefined")
    if spec.expectation == "final":
        n = spec.n_max
        drift = spec.weight_F(lengths[n]) * _chain_mean(n, lengths[n])
    else:
        drift = math.fsum(t / Z * spec.weight_F(lengths[n]) * _chain_mean(n, lengths[n])
                          for n, t in enumerate(terms, start=1) if t)
    return drift + math.log(Z)


def chain_entropy_2d(spec: ChainThermoSpec, lengths_x: FibonacciLengths,
                     lengths_y: FibonacciLengths) -> float:
    """2D analogue: ``G(l_nx, l_ny) (<X_n> + <Y_n>) + ln Z``.

    ``Z`` sums the literal two-dimensional formula
    ``(1/4)(P1(n, l) + P1(n, m))`` over ``n = 1..n_max``. The pair
    expectation is contracted to the sum of the two coordinate means.
    """
    n = spec.n_max
    if n > min(lengths_x.n_max, lengths_y.n_max):
        raise IndexError("lengths do not reach n_max")
    terms = [0.25 * (_lattice_prob(k, spec.l) + _lattice_prob(k, spec.m)) for k in range(1, n + 1)]
    Z = math.fsum(terms)
    if Z <= 0:
        raise ValueError(f"partition function vanishes for l={spec.l}, m={spec.m}, n_max={n}")

    def drift(k):
        lx, ly = lengths_x[k], lengths_y[k]
        return spec.weight_G(lx, ly) * (_chain_mean(k, lx) + _chain_mean(k, ly))

    if spec.expectation == "final":
        d = drift(n)
    else:
        d = math.fsum(t / Z * drift(k) for k, t in enumerate(terms, start=1) if t)
    return d + math.log(Z)
