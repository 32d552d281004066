"""Lattice random walks: closed forms, characteristic-function inversion,
exact convolution and Monte Carlo.

Three independent routes to the same law live side by side here so they
can be checked against one another:

* :func:`binomial_pmf` -- the combinatorial closed form,
* :func:`char_fn_prob` -- inversion of ``cos(k)**n`` over one period,
* :func:`dp_pmf` -- brute convolution of the two-point step law,

with :func:`monte_carlo_pmf` as a statistical estimator of the same law.
"""
from __future__ import annotations

import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .numerics import QuadratureError, QuadratureSpec, RandomStream, integrate
from .quasiperiodic import FibonacciLengths

__all__ = [
    "ChainSite",
    "LatticePMF",
    "StepDistribution",
    "WalkSample",
    "binomial_pmf",
    "char_fn_prob",
    "dp_pmf",
    "fibonacci_walk_position",
    "monte_carlo_pmf",
    "sample_walks",
    "two_d_audit",
    "two_d_dp_pmf",
    "two_d_paper_pmf",
]

MAX_BINOMIAL_N = 1000
MAX_SITES = 20_000_001
MC_CHUNK = 1 << 16

ChainSite = namedtuple("ChainSite", ["position", "probability"])
WalkSample = namedtuple("WalkSample", ["final_position", "n_steps"])


@dataclass
class LatticePMF:
    """Probability mass function over lattice sites after ``n_steps`` steps.

    ``support`` maps an integer site (or a pair of integers in 2D) to its
    probability. Monte Carlo estimates also carry the raw ``counts`` and the
    number of ``samples``.
    """

    n_steps: int
    support: dict = field(default_factory=dict)
    samples: int | None = None
    counts: dict | None = None

    def __getitem__(self, site):
        return self.support.get(site, 0.0)

    def __contains__(self, site):
        return site in self.support

    def __len__(self):
        return len(self.support)

    def sites(self):
        return sorted(self.support)

    def items(self):
        return [(s, self.support[s]) for s in self.sites()]

    def total(self):
        if self.counts is not None:
            return sum(self.counts.values()) / self.samples
        vals = list(self.support.values())
        if vals and all(isinstance(v, Fraction) for v in vals):
            return sum(vals, Fraction(0))
        return math.fsum(float(v) for v in vals)

    def mean(self):
        if not self.support:
            return 0.0
        if isinstance(next(iter(self.support)), tuple):
            return tuple(math.fsum(s[i] * float(p) for s, p in self.support.items()) for i in range(2))
        return math.fsum(s * float(p) for s, p in self.support.items())

    def stderr(self, site) -> float:
        """Binomial standard error of an empirical frequency."""
        if self.samples is None:
            return 0.0
        p = float(self[site])
        return math.sqrt(p * (1.0 - p) / self.samples)

    def max_abs_diff(self, other: "LatticePMF") -> float:
        sites = set(self.support) | set(other.support)
        return max((abs(float(self[s]) - float(other[s])) for s in sites), default=0.0)


@dataclass(frozen=True)
class StepDistribution:
    """Two-point step law: ``+l_k`` with probability ``p_right``, else ``-l_k``.

    ``length_schedule`` is either one constant length or the sequence of
    lengths for steps ``1, 2, ...``.
    """

    p_right: float = 0.5
    length_schedule: int | tuple = 1

    def __post_init__(self):
        if not 0.0 <= self.p_right <= 1.0:
            raise ValueError(f"p_right must lie in [0, 1], got {self.p_right}")
        sched = self.length_schedule
        if isinstance(sched, FibonacciLengths):
            sched = sched.values[1:]
        if not isinstance(sched, int):
            sched = tuple(int(v) for v in sched)
            if any(v < 1 for v in sched):
                raise ValueError("step lengths must be >= 1")
        elif sched < 1:
            raise ValueError("step lengths must be >= 1")
        object.__setattr__(self, "length_schedule", sched)

    def lengths(self, n_steps: int) -> tuple[int, ...]:
        if isinstance(self.length_schedule, int):
            return (self.length_schedule,) * n_steps
        if n_steps > len(self.length_schedule):
            raise IndexError(f"schedule has {len(self.length_schedule)} lengths, need {n_steps}")
        return self.length_schedule[:n_steps]


def _check_p(p):
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def binomial_pmf(N: int, p: float, exact: bool = False) -> LatticePMF:
    """Displacement law ``P_N(m)`` of ``N`` unit steps, right with probability ``p``.

    The support is every ``m`` with ``|m| <= N`` and ``m = N (mod 2)``.
    For ``N > 20`` the binomial coefficient is taken in log space. With
    ``exact=True`` the masses are :class:`fractions.Fraction` values.
    """
    _check_p(p)
    if N < 0 or N > MAX_BINOMIAL_N:
        raise ValueError(f"N must lie in [0, {MAX_BINOMIAL_N}], got {N}")
    support = {}
    if exact:
        p = Fraction(p)
        q = 1 - p
        for k in range(N + 1):
            support[2 * k - N] = math.comb(N, k) * p**k * q**(N - k)
        return LatticePMF(N, support)
    q = 1.0 - p
    for k in range(N + 1):
        if N <= 20 or p in (0.0, 1.0):
            prob = math.comb(N, k) * p**k * q**(N - k)
        else:
            prob = math.exp(math.log(math.comb(N, k)) + k * math.log(p) + (N - k) * math.log(q))
        support[2 * k - N] = prob
    if p == q:
        # log-space rounding is not mirror-symmetric; enforce P(m) == P(-m) exactly
        for m in range(1, N + 1):
            if m in support:
                support[m] = support[-m]
    return LatticePMF(N, support)


def _periodic_inversion(n, l, scale, start_nodes, tol, max_nodes):
    # (scale/2pi) * int_{-pi/scale}^{pi/scale} exp(-i l scale xi) cos(scale xi)**n dxi
    def integrand(xi):
        k = scale * xi
        c = np.cos(k) ** n
        return c * np.cos(l * k) - 1j * (c * np.sin(l * k))

    half = np.pi / scale
    nodes = start_nodes
    while nodes <= n + abs(l):
        nodes *= 2

    def estimate(m):
        val = scale * integrate(integrand, QuadratureSpec("trapezoid_periodic", m, (-half, half))) / (2 * np.pi)
        if abs(val.imag) > 1e-12:
            raise QuadratureError(f"imaginary part {val.imag:.3e} is not negligible (n={n}, l={l})")
        return val.real

    prev = estimate(nodes)
    while True:
        nodes *= 2
        cur = estimate(nodes)
        diff = abs(cur - prev)
        if diff < tol:
            return cur
        if nodes >= max_nodes:
            if diff > 1e-10:
                raise QuadratureError(f"no convergence for n={n}, l={l}: last doubling changed the estimate by {diff:.3e}")
            return cur
        prev = cur


def char_fn_prob(n: int, l: int, *, tol: float = 1e-12, max_nodes: int = 1 << 16) -> float:
    """Probability of site ``l`` after ``n`` symmetric unit steps, by Fourier inversion.

    Evaluates ``(1/2pi) int_{-pi}^{pi} exp(-i l k) cos(k)**n dk`` with the
    periodic trapezoid rule, doubling the node count from 64 (or from the
    first power of two above the integrand's trigonometric degree) until two
    successive estimates agree to ``tol``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return _periodic_inversion(n, int(l), 1.0, 64, tol, max_nodes)


def _lattice_prob(n, l):
    return 0.0 if abs(l) > n else char_fn_prob(n, l)


def _schedule(lengths, n):
    if isinstance(lengths, FibonacciLengths):
        return lengths.schedule(n)
    if isinstance(lengths, (int, np.integer)):
        return (int(lengths),) * n
    seq = tuple(int(v) for v in lengths)
    if len(seq) < n:
        raise IndexError(f"schedule has {len(seq)} lengths, need {n}")
    return seq[:n]


def fibonacci_walk_position(n: int, l: int, lengths) -> ChainSite:
    """Physical position ``l * l_n`` on a chain with step length ``l_n``, and its probability.

    The probability is computed in the chain's own variable ``xi`` over
    ``[-pi/l_n, pi/l_n]``; after the substitution ``k = l_n xi`` it is the
    same integral as :func:`char_fn_prob`, which the tests rely on.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(lengths, FibonacciLengths):
        if n > lengths.n_max:
            raise IndexError(f"n={n} is beyond the stored lengths (n_max={lengths.n_max})")
        ln = lengths[n]
    else:
        ln = _schedule(lengths, n)[n - 1]
    prob = _periodic_inversion(n, int(l), float(ln), 64, 1e-12, 1 << 16)
    return ChainSite(int(l) * int(ln), prob)


def _exact_convolution(lengths, p):
    p = Fraction(p)
    q = 1 - p
    law = {0: Fraction(1)}
    for ln in lengths:
        nxt = {}
        for site, mass in law.items():
            nxt[site + ln] = nxt.get(site + ln, 0) + p * mass
            nxt[site - ln] = nxt.get(site - ln, 0) + q * mass
        law = nxt
    return law


def dp_pmf(spec: StepDistribution, N: int, exact: bool = False) -> LatticePMF:
    """Exact law after ``N`` steps by repeated convolution of the step law.

    Sites are raw integer displacements (sums of ``+-l_k``). Every reachable
    site is kept in the support even when its mass is zero (``p`` of 0 or 1).
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    lengths = spec.lengths(N)
    if exact:
        law = _exact_convolution(lengths, spec.p_right)
        return LatticePMF(N, dict(sorted(law.items())))
    span = sum(lengths)
    size = 2 * span + 1
    if size > MAX_SITES:
        raise OverflowError(f"support of {size} sites exceeds the limit of {MAX_SITES}")
    p = float(spec.p_right)
    q = 1.0 - p
    mass = np.zeros(size)
    reach = np.zeros(size, dtype=bool)
    mass[span] = 1.0
    reach[span] = True
    for ln in lengths:
        new_mass = np.zeros(size)
        new_reach = np.zeros(size, dtype=bool)
        new_mass[ln:] += p * mass[:-ln]
        new_mass[:-ln] += q * mass[ln:]
        new_reach[ln:] |= reach[:-ln]
        new_reach[:-ln] |= reach[ln:]
        mass, reach = new_mass, new_reach
    idx = np.flatnonzero(reach)
    return LatticePMF(N, {int(i) - span: float(mass[i]) for i in idx})


def _walk_chunk(stream, size, lengths, p):
    rng = stream.generator()
    right = rng.random((size, lengths.size)) < p
    return np.where(right, lengths, -lengths).sum(axis=1)


def sample_walks(spec: StepDistribution, N: int, samples: int, stream: RandomStream,
                 chunk_size: int = MC_CHUNK, workers: int | None = None) -> np.ndarray:
    """Final positions of ``samples`` independent walks.

    Samples are split into fixed-size chunks and chunk ``k`` draws from
    ``stream.substream(k)``, so the output does not depend on ``workers``.
    """
    lengths = np.asarray(spec.lengths(N), dtype=np.int64)
    sizes = [min(chunk_size, samples - s) for s in range(0, samples, chunk_size)]
    jobs = [(stream.substream(k), size) for k, size in enumerate(sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _walk_chunk(job[0], job[1], lengths, spec.p_right), jobs))
    else:
        parts = [_walk_chunk(s, size, lengths, spec.p_right) for s, size in jobs]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def monte_carlo_pmf(spec: StepDistribution, N: int, samples: int, stream: RandomStream,
                    workers: int | None = None) -> LatticePMF:
    if N < 1:
        raise ValueError("N must be >= 1")
    if samples < 100:
        raise ValueError("need at least 100 samples")
    pos = sample_walks(spec, N, samples, stream, workers=workers)
    sites, counts = np.unique(pos, return_counts=True)
    cnt = {int(s): int(c) for s, c in zip(sites, counts)}
    return LatticePMF(N, {s: c / samples for s, c in cnt.items()}, samples=samples, counts=cnt)


def two_d_paper_pmf(n: int, l: int, m: int) -> float:
    """The two-dimensional chain formula taken literally.

    Returns ``(1/4) * (P1(n, l) + P1(n, m))`` where ``P1`` is the 1D
    inversion integral. This is *not* a normalised joint law; see
    :func:`two_d_audit`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return 0.25 * (_lattice_prob(n, l) + _lattice_prob(n, m))


def two_d_dp_pmf(n: int, lengths_x, lengths_y) -> LatticePMF:
    """Exact joint law of the four-point walk that moves along one axis per step.

    Step ``k`` goes to ``(+-lx_k, 0)`` or ``(0, +-ly_k)``, each with
    probability 1/4. ``lengths_x``/``lengths_y`` are Fibonacci lengths, a
    constant, or explicit schedules.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    lx = _schedule(lengths_x, n)
    ly = _schedule(lengths_y, n)
    sx, sy = sum(lx), sum(ly)
    shape = (2 * sx + 1, 2 * sy + 1)
    if shape[0] * shape[1] > MAX_SITES:
        raise OverflowError(f"support grid {shape} exceeds the limit of {MAX_SITES} sites")
    mass = np.zeros(shape)
    reach = np.zeros(shape, dtype=bool)
    mass[sx, sy] = 1.0
    reach[sx, sy] = True
    for a, b in zip(lx, ly):
        new_mass = np.zeros(shape)
        new_reach = np.zeros(shape, dtype=bool)
        for arr, new, scale in ((mass, new_mass, 0.25), (reach, new_reach, None)):
            parts = ((np.s_[a:, :], np.s_[:-a, :]), (np.s_[:-a, :], np.s_[a:, :]),
                     (np.s_[:, b:], np.s_[:, :-b]), (np.s_[:, :-b], np.s_[:, b:]))
            for dst, src in parts:
                if scale is None:
                    new[dst] |= arr[src]
                else:
                    new[dst] += scale * arr[src]
        mass, reach = new_mass, new_reach
    ix, iy = np.nonzero(reach)
    return LatticePMF(n, {(int(i) - sx, int(j) - sy): float(mass[i, j]) for i, j in zip(ix, iy)})


def two_d_audit(n: int, lengths_x, lengths_y) -> dict:
    """Compare the literal 2D formula against the exact four-point law.

    Reports the formula's mass over the window ``|l|, |m| <= n`` (which is
    ``(2n+1)/2``, not 1), the exact law's total mass, and the largest
    pointwise gap between the two on the lattice sites ``(l lx_n, m ly_n)``.
    """
    exact = two_d_dp_pmf(n, lengths_x, lengths_y)
    lxn = _schedule(lengths_x, n)[-1]
    lyn = _schedule(lengths_y, n)[-1]
    p1 = {l: _lattice_prob(n, l) for l in range(-n, n + 1)}
    worst, worst_site, window = 0.0, None, []
    for l in range(-n, n + 1):
        for m in range(-n, n + 1):
            formula = 0.25 * (p1[l] + p1[m])
            window.append(formula)
            gap = abs(formula - exact[(l * lxn, m * lyn)])
            if gap > worst:
                worst, worst_site = gap, (l, m)
    return {
        "n": n,
        "formula_window_mass": math.fsum(window),
        "exact_total_mass": exact.total(),
        "max_abs_deviation": worst,
        "max_deviation_site": worst_site,
    }
