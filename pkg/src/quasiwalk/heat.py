"""Gaussian heat kernel, its semigroup composition, path actions and the
random-walk (discrete path integral) representation of kernels.

Partitions of ``[0, t]`` may be non-uniform: wherever the uniform
construction uses ``t/N`` the code uses the actual increment ``dt_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numerics import QuadratureError, QuadratureSpec, RandomStream, integrate
from .quasiperiodic import QuasiperiodicSignal, TimePartition, signal_eval

__all__ = [
    "ActionFunctional",
    "DiffusionParams",
    "HeatKernelParams",
    "MCEstimate",
    "NonIntegrableActionError",
    "PiecewisePath",
    "compose_kernels",
    "generalized_kernel",
    "heat_kernel",
    "heat_solution",
    "kinetic_action",
    "length_action",
    "qp_brownian_density",
    "rw_representation_mc",
]

MAX_NESTED_SEGMENTS = 4
WINDOW_SIGMAS = 8.0
MIN_ESS_FRACTION = 0.1
_BLOCK = 1 << 18
_MAX_COMPOSE_NODES = 4096


class NonIntegrableActionError(ArithmeticError):
    """The kernel estimate did not settle as the budget was doubled."""


@dataclass(frozen=True)
class HeatKernelParams:
    dimension: int = 1
    time: float = 1.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not self.time > 0:
            raise ValueError(f"time must be positive, got {self.time}")


@dataclass(frozen=True)
class DiffusionParams:
    D: float = 0.5

    def __post_init__(self):
        if not self.D > 0:
            raise ValueError("diffusion constant must be positive")


def _point(x, d):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (d,):
        raise ValueError(f"expected a point in R^{d}, got shape {x.shape}")
    return x


def _gauss(dt, sq, d):
    return (2.0 * np.pi * dt) ** (-0.5 * d) * np.exp(-sq / (2.0 * dt))


def heat_kernel(params: HeatKernelParams, x, y) -> float:
    """``K_t(x, y) = (2 pi t)^(-d/2) exp(-|x - y|^2 / 2t)``."""
    d = params.dimension
    diff = _point(x, d) - _point(y, d)
    return float(_gauss(params.time, diff @ diff, d))


def heat_solution(phi0, params: HeatKernelParams, y, quad: QuadratureSpec | None = None,
                  rtol: float = 1e-10) -> float:
    """Solution of ``u_t = (1/2) u_xx`` at ``(y, t)`` from the initial profile ``phi0`` (1D).

    With an explicit ``quad`` the convolution is taken once with that rule.
    By default Gauss-Legendre on ``y +- 12 sqrt(t)`` starts at 201 nodes and
    doubles until two estimates agree to ``rtol``, so narrow initial
    profiles are resolved.

    Raises
    ------
    QuadratureError
        If the default rule has not settled at 1608 nodes (e.g. a
        discontinuous ``phi0``); pass an explicit ``quad`` in that case.
    """
    if params.dimension != 1:
        raise ValueError("quadrature solution is implemented for d = 1 only")
    t = params.time
    y = float(np.squeeze(y))

    def f(x):
        return _gauss(t, (x - y) ** 2, 1) * phi0(x)

    if quad is not None:
        return integrate(f, quad)
    w = 12.0 * math.sqrt(t)
    nodes = 201
    prev = integrate(f, QuadratureSpec("gauss_legendre", nodes, (y - w, y + w)))
    while nodes < 1608:
        nodes *= 2
        cur = integrate(f, QuadratureSpec("gauss_legendre", nodes, (y - w, y + w)))
        if abs(cur - prev) <= rtol * max(abs(cur), 1.0):
            return cur
        prev = cur
    raise QuadratureError(f"convolution did not settle at {nodes} nodes; supply an explicit quad")


def _bridge_windows(partition, x, y):
    t = partition.t_total
    ti = partition.times[1:-1]
    mu = x + (y - x) * ti / t
    sigma = np.sqrt(ti * (t - ti) / t)
    return mu, sigma


def _compose_once(partition, x, y, quad):
    mu, sigma = _bridge_windows(partition, x, y)
    axes, weights = [], []
    for m, s in zip(mu, sigma):
        nodes, w = quad.with_interval(m - WINDOW_SIGMAS * s, m + WINDOW_SIGMAS * s).nodes_weights()
        axes.append(nodes)
        weights.append(w)
    dt = partition.increments
    # Transfer-matrix form of the nested integral: one kernel matrix per interior step.
    v = _gauss(dt[0], (axes[0] - x) ** 2, 1) * weights[0]
    for i in range(1, len(axes)):
        k = _gauss(dt[i], (axes[i][None, :] - axes[i - 1][:, None]) ** 2, 1)
        v = (v @ k) * weights[i]
    return float(v @ _gauss(dt[-1], (y - axes[-1]) ** 2, 1))


def compose_kernels(partition: TimePartition, x, y, d: int = 1,
                    quad: QuadratureSpec | None = None, rtol: float = 1e-10) -> float:
    """Chapman-Kolmogorov composition of kernels over ``partition`` by nested quadrature.

    Each intermediate point is integrated over its Brownian-bridge window
    ``mu_i +- 8 sigma_i``. With an explicit ``quad`` only its rule and node
    count are used, once. By default Gauss-Legendre nodes per axis are
    doubled from 64 until two estimates agree to ``rtol``, which matters
    when one increment is much shorter than the bridge windows. Limited to
    ``d = 1`` and at most 4 segments; use :func:`rw_representation_mc`
    beyond that.
    """
    if d != 1:
        raise ValueError("nested quadrature is implemented for d = 1 only")
    x = float(np.squeeze(x))
    y = float(np.squeeze(y))
    n = partition.n_segments
    if n == 1:
        return heat_kernel(HeatKernelParams(1, partition.t_total), x, y)
    if n > MAX_NESTED_SEGMENTS:
        raise ValueError(f"{n} segments need {n - 1} nested integrals; nested quadrature stops at "
                         f"{MAX_NESTED_SEGMENTS} segments, use rw_representation_mc instead")
    if quad is not None:
        return _compose_once(partition, x, y, quad)
    nodes = 64
    prev = _compose_once(partition, x, y, QuadratureSpec("gauss_legendre", nodes))
    while nodes < _MAX_COMPOSE_NODES:
        nodes *= 2
        cur = _compose_once(partition, x, y, QuadratureSpec("gauss_legendre", nodes))
        if _settled(prev, cur, rtol):
            return cur
        prev = cur
    raise QuadratureError(f"composition did not settle with {nodes} nodes per axis")


@dataclass(frozen=True, eq=False)
class PiecewisePath:
    """Piecewise linear path through ``nodes`` at the partition times.

    ``nodes`` has shape ``(N + 1, d)``; a flat sequence is read as a 1D path.
    """

    partition: TimePartition
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim == 1:
            nodes = nodes[:, None]
        if nodes.ndim != 2 or nodes.shape[0] != self.partition.times.size:
            raise ValueError(f"need one node per partition time ({self.partition.times.size}), "
                             f"got shape {nodes.shape}")
        object.__setattr__(self, "nodes", nodes)

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @classmethod
    def straight(cls, partition: TimePartition, x, y) -> "PiecewisePath":
        """Constant-velocity path from ``x`` to ``y``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        s = (partition.times / partition.t_total)[:, None]
        return cls(partition, x + s * (y - x))


def _kinetic_batch(dt, nodes):
    steps = np.diff(nodes, axis=-2)
    return 0.5 * np.sum(np.sum(steps**2, axis=-1) / dt, axis=-1)


def _variation_batch(nodes):
    steps = np.diff(nodes, axis=-2)
    return np.sum(np.sqrt(np.sum(steps**2, axis=-1)), axis=-1)


def kinetic_action(path: PiecewisePath) -> float:
    """``(1/2) sum_i |x_i - x_{i-1}|^2 / dt_i``, i.e. half the integral of ``|w'|^2``."""
    dt = path.partition.increments
    if np.any(dt <= 0):
        raise ValueError("time increments must be positive")
    return float(_kinetic_batch(dt, path.nodes))


def length_action(path: PiecewisePath, beta_tilde: float) -> float:
    """``beta_tilde`` times the total variation ``sum_i |x_i - x_{i-1}|``."""
    return float(beta_tilde * _variation_batch(path.nodes))


@dataclass(frozen=True)
class ActionFunctional:
    """An action ``S`` on piecewise linear paths.

    ``evaluator`` maps a :class:`PiecewisePath` to a float. ``batch``, when
    given, evaluates many paths at once from ``(increments, nodes)`` with
    ``nodes`` of shape ``(samples, N + 1, d)``.
    """

    kind: str
    evaluator: Callable[[PiecewisePath], float]
    batch: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    beta_tilde: float | None = None

    def __call__(self, path: PiecewisePath) -> float:
        return self.evaluator(path)

    def evaluate_many(self, partition: TimePartition, nodes: np.ndarray) -> np.ndarray:
        if self.batch is not None:
            return self.batch(partition.increments, nodes)
        return np.array([self.evaluator(PiecewisePath(partition, p)) for p in nodes])

    @classmethod
    def kinetic(cls) -> "ActionFunctional":
        return cls("kinetic", kinetic_action, _kinetic_batch)

    @classmethod
    def length(cls, beta_tilde: float) -> "ActionFunctional":
        return cls("length", lambda p: length_action(p, beta_tilde),
                   lambda dt, nodes: beta_tilde * _variation_batch(nodes), beta_tilde)

    @classmethod
    def custom(cls, evaluator, batch=None) -> "ActionFunctional":
        return cls("custom", evaluator, batch)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    proposal: str
    ess: float = float("nan")

    def __float__(self):
        return self.mean


def _measure_norm(partition, d):
    # Product of (2 pi dt_i)^(-d/2): the discrete path measure with dt_i in place of t/N.
    return float(np.prod((2.0 * np.pi * partition.increments) ** (-0.5 * d)))


def _sample_bridge(rng, partition, x, y, samples):
    d = x.size
    times = partition.times
    t = partition.t_total
    n = partition.n_segments
    nodes = np.empty((samples, n + 1, d))
    nodes[:, 0] = x
    nodes[:, n] = y
    for i in range(1, n):
        remaining = t - times[i - 1]
        dt = times[i] - times[i - 1]
        prev = nodes[:, i - 1]
        mean = prev + (y - prev) * (dt / remaining)
        var = dt * (t - times[i]) / remaining
        nodes[:, i] = mean + math.sqrt(var) * rng.standard_normal((samples, d))
    return nodes


def _sample_free(rng, partition, x, y, samples):
    d = x.size
    n = partition.n_segments
    dt = partition.increments
    nodes = np.empty((samples, n + 1, d))
    nodes[:, 0] = x
    nodes[:, n] = y
    for i in range(1, n):
        nodes[:, i] = nodes[:, i - 1] + math.sqrt(dt[i - 1]) * rng.standard_normal((samples, d))
    return nodes


def rw_representation_mc(x, y, partition: TimePartition, d: int = 1, samples: int = 100_000,
                         stream: RandomStream | None = None, action: ActionFunctional | None = None,
                         proposal: str = "bridge", chunk_size: int = 1 << 15) -> MCEstimate:
    """Monte Carlo estimate of the discrete path integral of ``exp(-S)``.

    With ``proposal="bridge"`` the intermediate nodes are drawn from the
    exact Brownian-bridge law for the partition, so each sample contributes
    ``K_t(x, y) * exp(-(S - S_kin))``; for the kinetic action every weight
    is exactly 1. ``proposal="free"`` draws a free random walk from ``x``
    and weights by the last kernel factor, which gives a noisy but unbiased
    estimate of the same quantity. ``action`` defaults to the kinetic one.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if partition.n_segments < 2:
        raise ValueError("the path integral needs at least 2 segments")
    if proposal not in ("bridge", "free"):
        raise ValueError(f"unknown proposal {proposal!r}")
    stream = stream if stream is not None else RandomStream(0)
    action = action or ActionFunctional.kinetic()
    x = _point(x, d)
    y = _point(y, d)
    dt = partition.increments
    total = 0.0
    total_sq = 0.0
    for k, start in enumerate(range(0, samples, chunk_size)):
        size = min(chunk_size, samples - start)
        rng = stream.substream(k).generator()
        if proposal == "bridge":
            nodes = _sample_bridge(rng, partition, x, y, size)
            base = heat_kernel(HeatKernelParams(d, partition.t_total), x, y)
        else:
            nodes = _sample_free(rng, partition, x, y, size)
            base = _gauss(dt[-1], np.sum((y - nodes[:, -2]) ** 2, axis=-1), d)
        if action.kind == "kinetic":
            w = base * np.ones(size)
        else:
            excess = action.evaluate_many(partition, nodes) - _kinetic_batch(dt, nodes)
            w = base * np.exp(-excess)
        if not np.all(np.isfinite(w)):
            raise NonIntegrableActionError("non-finite importance weight; the action is not "
                                           "integrable against the path measure")
        total += math.fsum(w)
        total_sq += math.fsum(w * w)
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    ess = total * total / total_sq if total_sq > 0 else 0.0
    return MCEstimate(mean, math.sqrt(var / (samples - 1)), samples, stream.master_seed, proposal, ess)


def _half_line_rule(n, scale=2.0):
    # Gauss-Legendre on v in (0, 1), mapped to s in (0, inf) by s = scale * v / (1 - v).
    v, w = np.polynomial.legendre.leggauss(n)
    v = 0.5 * (v + 1.0)
    w = 0.5 * w
    return scale * v / (1.0 - v), scale * w / (1.0 - v) ** 2


def _axis_rule(breaks, sigma, n):
    # Composite rule on the real line: half-lines beyond the outer breakpoints,
    # Gauss-Legendre on each finite piece in between.
    s, ws = _half_line_rule(n)
    lo, hi = breaks[0], breaks[-1]
    nodes = [lo - sigma * s[::-1]]
    weights = [sigma * ws[::-1]]
    for a, b in zip(breaks[:-1], breaks[1:]):
        x, w = QuadratureSpec("gauss_legendre", n, (a, b)).nodes_weights()
        nodes.append(x)
        weights.append(w)
    nodes.append(hi + sigma * s)
    weights.append(sigma * ws)
    return np.concatenate(nodes), np.concatenate(weights)


def _kernel_quadrature(action, partition, x, y, n_per_piece):
    mu, sigma = _bridge_windows(partition, x, y)
    n = partition.n_segments
    axes, weights = [], []
    for i, (m, sg) in enumerate(zip(mu, sigma), start=1):
        # Actions built from |x_i - x_{i-1}| have kinks where a node meets a fixed endpoint.
        breaks = {m}
        if i == 1:
            breaks.add(x)
        if i == n - 1:
            breaks.add(y)
        nodes, w = _axis_rule(sorted(breaks), sg, n_per_piece)
        axes.append(nodes)
        weights.append(w)
    grid = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")]
    wgrid = np.prod(np.meshgrid(*weights, indexing="ij"), axis=0).ravel()
    total = 0.0
    for start in range(0, wgrid.size, _BLOCK):
        blk = slice(start, start + _BLOCK)
        size = wgrid[blk].size
        nodes = np.empty((size, n + 1, 1))
        nodes[:, 0, 0] = x
        nodes[:, n, 0] = y
        for i, g in enumerate(grid, start=1):
            nodes[:, i, 0] = g[blk]
        total += float(np.dot(wgrid[blk], np.exp(-action.evaluate_many(partition, nodes))))
    return _measure_norm(partition, 1) * total


def _settled(a, b, tol):
    scale = max(abs(a), abs(b))
    return scale == 0.0 or abs(b - a) / scale < tol


def generalized_kernel(action: ActionFunctional, x, y, partition: TimePartition, d: int = 1,
                       method: str = "quadrature", budget: int | None = None,
                       stream: RandomStream | None = None, rtol: float = 1e-3) -> float:
    """Kernel ``H_t^N(x, y)``: the discrete path measure integrated against ``exp(-S)``.

    ``budget`` is the number of Gauss-Legendre nodes per half-axis for
    ``method="quadrature"`` (d = 1, at most 4 segments) or the sample count
    for ``method="monte_carlo"``. The estimate is recomputed after two
    successive budget doublings and must change by less than ``rtol``
    (relative) each time; for Monte Carlo the threshold is widened to four
    combined standard errors when those are larger, and runs whose
    importance weights have an effective sample size below 10% are rejected.

    Raises
    ------
    NonIntegrableActionError
        If the estimate does not settle, which is what happens for actions
        that do not make ``exp(-S)`` integrable.
    """
    n = partition.n_segments
    if method == "quadrature":
        if d != 1:
            raise ValueError("quadrature is implemented for d = 1 only")
        x = float(np.squeeze(x))
        y = float(np.squeeze(y))
        if n == 1:
            path = PiecewisePath(partition, [x, y])
            return _measure_norm(partition, 1) * math.exp(-action(path))
        if n > MAX_NESTED_SEGMENTS:
            raise ValueError(f"nested quadrature stops at {MAX_NESTED_SEGMENTS} segments; "
                             "use method='monte_carlo'")
        base = budget or {2: 32, 3: 24, 4: 12}[n]
        estimates = [_kernel_quadrature(action, partition, x, y, base * 2**j) for j in range(3)]
        errs = [0.0, 0.0, 0.0]
    elif method == "monte_carlo":
        base = budget or 50_000
        stream = stream if stream is not None else RandomStream(0)
        runs = [rw_representation_mc(x, y, partition, d, base * 2**j, stream.substream(j), action)
                for j in range(3)]
        for r in runs:
            if not r.ess >= MIN_ESS_FRACTION * r.samples:
                raise NonIntegrableActionError(
                    f"importance weights degenerate (effective sample size {r.ess:.1f} of {r.samples}); "
                    "the bridge proposal does not cover this action, use method='quadrature'")
        estimates = [r.mean for r in runs]
        errs = [r.stderr for r in runs]
    else:
        raise ValueError(f"unknown method {method!r}")
    for j in (1, 2):
        a, b = estimates[j - 1], estimates[j]
        scale = max(abs(a), abs(b))
        tol = rtol
        if scale > 0 and method == "monte_carlo":
            tol = max(rtol, 4.0 * math.hypot(errs[j - 1], errs[j]) / scale)
        if not (math.isfinite(b) and _settled(a, b, tol)):
            raise NonIntegrableActionError(
                f"kernel estimate did not settle under budget doubling: {estimates}")
    return estimates[-1]


def qp_brownian_density(signal: QuasiperiodicSignal, diff: DiffusionParams, tau: float) -> float:
    """Diffusion density ``(4 pi D tau)^(-1/2) exp(-x(tau)^2 / 4 D tau)`` evaluated at the
    quasiperiodic displacement ``x(tau)``."""
    if not tau > 0:
        raise ValueError("tau must be positive; the density is singular at tau = 0")
    x = signal_eval(signal, tau)
    four_dt = 4.0 * diff.D * tau
    return float(math.exp(-x * x / four_dt) / math.sqrt(math.pi * four_dt))
