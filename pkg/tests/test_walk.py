import itertools
import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasiwalk.numerics import make_stream
from quasiwalk.quasiperiodic import fibonacci_lengths
from quasiwalk.walk import (LatticePMF, StepDistribution, binomial_pmf, char_fn_prob, dp_pmf,
                            fibonacci_walk_position, monte_carlo_pmf, sample_walks, two_d_audit,
                            two_d_dp_pmf, two_d_paper_pmf)


def enumerate_1d(lengths, p):
    """Exact law by listing every sign sequence."""
    p = Fraction(p)
    law = defaultdict(Fraction)
    for signs in itertools.product((1, -1), repeat=len(lengths)):
        w = Fraction(1)
        for s in signs:
            w *= p if s == 1 else 1 - p
        law[sum(s * l for s, l in zip(signs, lengths))] += w
    return dict(law)


def enumerate_2d(lx, ly):
    moves = lambda a, b: ((a, 0), (-a, 0), (0, b), (0, -b))
    law = defaultdict(Fraction)
    for seq in itertools.product(range(4), repeat=len(lx)):
        x = y = 0
        for k, i in enumerate(seq):
            dx, dy = moves(lx[k], ly[k])[i]
            x += dx
            y += dy
        law[(x, y)] += Fraction(1, 4 ** len(lx))
    return dict(law)


# -- binomial closed form

def test_binomial_n4_center():
    assert binomial_pmf(4, 0.5)[0] == 0.375
    assert float(enumerate_1d([1] * 4, Fraction(1, 2))[0]) == 0.375


def test_binomial_parity_and_deterministic():
    assert 1 not in binomial_pmf(2, 0.3)
    assert binomial_pmf(2, 0.3)[1] == 0.0
    assert binomial_pmf(1, 1.0)[1] == 1.0
    assert binomial_pmf(1, 1.0)[-1] == 0.0


@pytest.mark.parametrize("N", range(0, 11))
@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_binomial_matches_enumeration(N, p):
    ref = enumerate_1d([1] * N, p)
    got = binomial_pmf(N, p)
    assert set(ref) == set(got.support)
    for m, v in ref.items():
        assert got[m] == pytest.approx(float(v), abs=1e-15)


@pytest.mark.parametrize("N", [0, 1, 7, 20, 21, 50, 300, 1000])
@pytest.mark.parametrize("p", [0.5, 0.13, 0.999])
def test_binomial_normalized_and_supported(N, p):
    pmf = binomial_pmf(N, p)
    assert abs(pmf.total() - 1.0) <= 1e-12
    assert all(abs(m) <= N and (m - N) % 2 == 0 for m in pmf.sites())
    assert len(pmf) == N + 1


def test_binomial_log_space_agrees_with_exact():
    exact = binomial_pmf(30, 0.3, exact=True)
    approx = binomial_pmf(30, 0.3)
    assert exact.total() == 1
    for m in exact.sites():
        assert approx[m] == pytest.approx(float(exact[m]), rel=1e-12, abs=1e-300)


@given(N=st.integers(0, 200))
def test_binomial_symmetry_at_half(N):
    pmf = binomial_pmf(N, 0.5)
    assert all(pmf[m] == pmf[-m] for m in pmf.sites())


def test_binomial_rejects_bad_input():
    with pytest.raises(ValueError):
        binomial_pmf(3, 1.5)
    with pytest.raises(ValueError):
        binomial_pmf(1001, 0.5)


# -- Fourier inversion

def test_char_fn_examples():
    assert char_fn_prob(4, 0) == pytest.approx(0.375, abs=1e-14)
    assert char_fn_prob(3, 3) == pytest.approx(0.125, abs=1e-14)
    assert abs(char_fn_prob(3, 0)) < 1e-15


def test_char_fn_matches_binomial_coefficients():
    for n in range(0, 31):
        for l in range(-n, n + 1):
            ref = math.comb(n, (n + l) // 2) / 2**n if (n + l) % 2 == 0 else 0.0
            assert abs(char_fn_prob(n, l) - ref) <= 1e-10


def test_char_fn_is_exactly_symmetric():
    for n in (5, 16, 31):
        for l in range(n + 1):
            assert char_fn_prob(n, l) == char_fn_prob(n, -l)


def test_char_fn_large_n_needs_more_nodes():
    # degree n + |l| exceeds the initial 64 nodes; the rule must start above it
    ref = math.comb(150, 75) / 2**150
    assert char_fn_prob(150, 0) == pytest.approx(ref, rel=1e-10)


def test_fibonacci_walk_position():
    fib = fibonacci_lengths(10)
    site = fibonacci_walk_position(5, 2, fib)
    assert site.position == 10
    assert site.probability == pytest.approx(char_fn_prob(5, 2), abs=1e-12)
    one = fibonacci_walk_position(1, 1, fib)
    assert one.position == 1
    assert one.probability == pytest.approx(0.5, abs=1e-14)
    with pytest.raises(IndexError):
        fibonacci_walk_position(11, 0, fib)


@pytest.mark.parametrize("n", [4, 9, 16])
def test_fibonacci_probability_independent_of_step_length(n):
    schedules = [fibonacci_lengths(20), 1, 3, [13] * n]
    for l in range(-n, n + 1):
        probs = [fibonacci_walk_position(n, l, s).probability for s in schedules]
        assert max(probs) - min(probs) <= 1e-12
        assert abs(probs[0] - char_fn_prob(n, l)) <= 1e-12


# -- exact convolution

def test_dp_constant_matches_binomial():
    dp = dp_pmf(StepDistribution(0.5, 1), 4)
    assert dp.support == binomial_pmf(4, 0.5).support


def test_dp_fibonacci_three_steps_by_enumeration():
    lengths = fibonacci_lengths(3).schedule(3)
    ref = enumerate_1d(lengths, Fraction(1, 2))
    assert set(ref) <= {0, 2, -2, 4, -4}
    dp = dp_pmf(StepDistribution(0.5, fibonacci_lengths(3)), 3)
    exact = dp_pmf(StepDistribution(0.5, fibonacci_lengths(3)), 3, exact=True)
    assert exact.support == ref
    assert dp.support == {k: float(v) for k, v in ref.items()}
    assert dp[0] == 0.25 and dp[4] == 0.125


@pytest.mark.parametrize("N", range(0, 11))
def test_dp_fibonacci_matches_enumeration(N):
    fib = fibonacci_lengths(12)
    ref = enumerate_1d(fib.schedule(N), Fraction(3, 10))
    got = dp_pmf(StepDistribution(0.3, fib), N)
    assert set(got.support) == set(ref)
    for site, v in ref.items():
        assert got[site] == pytest.approx(float(v), abs=1e-15)


def test_dp_zero_steps_is_point_mass():
    pmf = dp_pmf(StepDistribution(0.4, fibonacci_lengths(5)), 0)
    assert pmf.support == {0: 1.0}


@pytest.mark.parametrize("N", [1, 5, 12, 20])
def test_dp_normalization(N):
    fib = StepDistribution(0.5, fibonacci_lengths(20))
    assert abs(dp_pmf(fib, N).total() - 1.0) <= 1e-12
    assert dp_pmf(fib, N, exact=True).total() == 1


def test_dp_support_overflow():
    with pytest.raises(OverflowError):
        dp_pmf(StepDistribution(0.5, fibonacci_lengths(60)), 50)


def test_step_distribution_validation():
    with pytest.raises(ValueError):
        StepDistribution(-0.1)
    with pytest.raises(ValueError):
        StepDistribution(0.5, [1, 0, 2])
    with pytest.raises(IndexError):
        StepDistribution(0.5, [1, 2]).lengths(3)


# -- Monte Carlo

def test_mc_against_dp_four_sigma():
    spec = StepDistribution(0.5, 1)
    exact = dp_pmf(spec, 4)
    mc = monte_carlo_pmf(spec, 4, 1_000_000, make_stream(11))
    bound = 4 * math.sqrt(0.375 * 0.625 / 1e6)
    assert max(abs(mc[s] - exact[s]) for s in exact.sites()) < bound
    assert mc.total() == 1.0
    assert set(mc.sites()) <= set(exact.sites())


def test_mc_deterministic_walk():
    fib = fibonacci_lengths(10)
    mc = monte_carlo_pmf(StepDistribution(1.0, fib), 7, 500, make_stream(3))
    assert mc.support == {sum(fib.schedule(7)): 1.0}


def test_mc_reproducible_and_worker_independent():
    spec = StepDistribution(0.37, fibonacci_lengths(12))
    a = monte_carlo_pmf(spec, 9, 200_000, make_stream(8))
    b = monte_carlo_pmf(spec, 9, 200_000, make_stream(8), workers=4)
    assert a.counts == b.counts
    c = monte_carlo_pmf(spec, 9, 200_000, make_stream(9))
    assert a.counts != c.counts


def test_mc_chunking_does_not_change_draws_per_chunk():
    spec = StepDistribution(0.5, 2)
    pos = sample_walks(spec, 5, 1000, make_stream(4), chunk_size=300)
    assert pos.shape == (1000,)
    assert np.all(np.abs(pos) <= 10)


def test_mc_requires_samples():
    with pytest.raises(ValueError):
        monte_carlo_pmf(StepDistribution(), 3, 50, make_stream(0))


# -- two dimensions

def test_two_d_closed_formula_values():
    assert two_d_paper_pmf(2, 0, 0) == pytest.approx(0.25, abs=1e-12)
    assert two_d_paper_pmf(1, 1, 1) == pytest.approx(0.25, abs=1e-12)
    assert abs(two_d_paper_pmf(1, 0, 0)) < 1e-12


def test_two_d_dp_single_step():
    fib = fibonacci_lengths(3)
    pmf = two_d_dp_pmf(1, fib, fib)
    assert pmf.support == {(1, 0): 0.25, (-1, 0): 0.25, (0, 1): 0.25, (0, -1): 0.25}


def test_two_d_dp_two_steps_enumerated():
    pmf = two_d_dp_pmf(2, 1, 1)
    ref = enumerate_2d([1, 1], [1, 1])
    assert pmf.support == {k: float(v) for k, v in ref.items()}
    assert pmf[(0, 0)] == 0.25


@pytest.mark.parametrize("n", [1, 3, 5])
def test_two_d_dp_fibonacci_enumerated(n):
    lx = fibonacci_lengths(n + 2).schedule(n)
    ly = fibonacci_lengths(n + 3).values[2:n + 2]
    ref = enumerate_2d(lx, ly)
    pmf = two_d_dp_pmf(n, lx, ly)
    assert set(pmf.support) == set(ref)
    for k, v in ref.items():
        assert pmf[k] == pytest.approx(float(v), abs=1e-15)


def lazy_walk_dp(n):
    """1D walk that moves +-1 w.p. 1/4 each and stays w.p. 1/2."""
    law = {0: Fraction(1)}
    for _ in range(n):
        nxt = defaultdict(Fraction)
        for s, m in law.items():
            nxt[s - 1] += m / 4
            nxt[s + 1] += m / 4
            nxt[s] += m / 2
        law = nxt
    return law


@pytest.mark.parametrize("n", [1, 4, 9])
def test_two_d_marginal_is_lazy_walk(n):
    pmf = two_d_dp_pmf(n, 1, 1)
    marginal = defaultdict(float)
    for (x, _), p in pmf.items():
        marginal[x] += p
    ref = lazy_walk_dp(n)
    assert set(marginal) == set(ref)
    for x, v in ref.items():
        assert marginal[x] == pytest.approx(float(v), abs=1e-14)


@pytest.mark.parametrize("n", [1, 6, 12])
def test_two_d_dp_normalized(n):
    fib = fibonacci_lengths(n)
    assert abs(two_d_dp_pmf(n, fib, fib).total() - 1.0) <= 1e-12


def test_two_d_formula_is_not_normalized():
    # Over |l|, |m| <= n the formula sums to (2n + 1)/2, growing with the window.
    masses = []
    for n in (2, 4, 8):
        audit = two_d_audit(n, 1, 1)
        assert audit["formula_window_mass"] == pytest.approx((2 * n + 1) / 2, abs=1e-10)
        assert abs(audit["exact_total_mass"] - 1.0) <= 1e-12
        assert audit["max_abs_deviation"] > 0.05
        masses.append(audit["formula_window_mass"])
    assert masses == sorted(masses) and masses[-1] > 8


def test_lattice_pmf_helpers():
    pmf = LatticePMF(2, {-2: 0.25, 0: 0.5, 2: 0.25})
    assert pmf.mean() == 0.0
    assert pmf.items() == [(-2, 0.25), (0, 0.5), (2, 0.25)]
    assert pmf.max_abs_diff(LatticePMF(2, {0: 1.0})) == 0.5
    assert pmf.stderr(0) == 0.0
