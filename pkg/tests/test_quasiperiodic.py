import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasiwalk.quasiperiodic import (GOLDEN_RATIO, FibonacciWord, QuasiperiodicSignal, TimePartition, custom_partition,
                                     fibonacci_lengths, fibonacci_word, quasiperiodic_partition,
                                     signal_eval, uniform_partition)


def test_lengths_small():
    assert fibonacci_lengths(6).values == (0, 1, 1, 2, 3, 5, 8)
    assert fibonacci_lengths(0).values == (0,)
    assert fibonacci_lengths(10)[10] == 55


def test_lengths_recurrence_and_overflow_bound():
    v = fibonacci_lengths(92).values
    assert all(v[n + 1] == v[n] + v[n - 1] for n in range(1, 92))
    assert all(a < b for a, b in zip(v[2:], v[3:]))
    assert v[92] < 2**63 <= v[91] + v[92]
    with pytest.raises(OverflowError):
        fibonacci_lengths(93)
    with pytest.raises(ValueError):
        fibonacci_lengths(-1)


def test_word_small_generations():
    assert fibonacci_word(1).symbols == "A"
    assert fibonacci_word(2).symbols == "AB"
    assert fibonacci_word(4).symbols == "ABAAB"


def test_word_lengths_follow_recurrence():
    lengths = fibonacci_lengths(30)
    assert len(fibonacci_word(7)) == 21 == lengths[8]
    for g in range(1, 25):
        assert len(fibonacci_word(g)) == lengths[g + 1]


def test_word_prefix_property():
    for g in range(1, 20):
        assert fibonacci_word(g + 1).symbols.startswith(fibonacci_word(g).symbols)


def test_word_letter_ratio_tends_to_golden_ratio():
    w = fibonacci_word(30)
    assert w.count("A") / w.count("B") == pytest.approx(GOLDEN_RATIO, rel=1e-10)


def test_word_limits():
    with pytest.raises(ValueError):
        fibonacci_word(0)
    with pytest.raises(OverflowError):
        fibonacci_word(200)


def test_signal_origin_and_degenerate_case():
    assert signal_eval(QuasiperiodicSignal(0.3), 0.0) == 2.0
    assert QuasiperiodicSignal().alpha == GOLDEN_RATIO
    tau = np.linspace(-3, 3, 41)
    assert np.allclose(signal_eval(QuasiperiodicSignal(1.0), tau), 2 * np.cos(2 * np.pi * tau), atol=1e-15)


def test_signal_matches_extended_precision():
    mpmath.mp.dps = 40
    alpha = (1 + mpmath.sqrt(5)) / 2
    tau = mpmath.mpf("0.5")
    ref = mpmath.cos(2 * mpmath.pi * tau) + mpmath.cos(2 * mpmath.pi * alpha * tau)
    assert abs(signal_eval(QuasiperiodicSignal(GOLDEN_RATIO), 0.5) - float(ref)) < 1e-12


def test_signal_has_no_short_period_for_golden_ratio():
    # Shift by P unit steps: cos(2 pi tau) repeats, so any period would need alpha*P near an integer.
    sig = QuasiperiodicSignal(GOLDEN_RATIO)
    shifts = np.arange(1, 1_000_001, dtype=float)
    worst = np.zeros_like(shifts)
    for tau in (0.1, 0.37, 0.5, 0.81):
        worst = np.maximum(worst, np.abs(signal_eval(sig, tau + shifts) - signal_eval(sig, tau)))
    assert worst.min() > 1e-9


def test_integer_alpha_signal_is_one_periodic():
    sig = QuasiperiodicSignal(3.0)
    tau = np.linspace(0, 1, 17)
    assert np.allclose(signal_eval(sig, tau + 1.0), signal_eval(sig, tau), atol=1e-12)


def test_partition_from_word_ab():
    p = quasiperiodic_partition(1.0, 2, fibonacci_word(2))
    phi = GOLDEN_RATIO
    assert p.increments == pytest.approx([phi / (phi + 1), 1 / (phi + 1)], abs=1e-15)
    assert p.kind == "fibonacci_word"


def test_partition_all_a_prefix_is_uniform():
    assert quasiperiodic_partition(3.0, 1, fibonacci_word(5)).times.tolist() == [0.0, 3.0]
    q = quasiperiodic_partition(2.0, 4, FibonacciWord("AAAA", 0))
    assert np.allclose(q.increments, 0.5, atol=1e-15)


def test_partition_sums_to_total():
    p = quasiperiodic_partition(2.0, 5, fibonacci_word(4))
    assert p.n_segments == 5
    assert abs(math.fsum(p.increments) - 2.0) <= 1e-15
    assert p.times[0] == 0.0 and p.times[-1] == 2.0


@given(t=st.floats(1e-3, 1e3), n=st.integers(1, 200))
def test_partition_increment_sum_within_4_ulps(t, n):
    for p in (quasiperiodic_partition(t, n, fibonacci_word(13)), uniform_partition(t, n)):
        assert abs(float(np.sum(p.increments)) - t) <= 4 * math.ulp(t)
        assert np.all(p.increments > 0)


def test_partition_errors():
    with pytest.raises(ValueError):
        quasiperiodic_partition(1.0, 6, fibonacci_word(4))
    with pytest.raises(ValueError):
        custom_partition([0.0, 0.5, 0.5, 1.0])
    with pytest.raises(ValueError):
        custom_partition([0.1, 1.0])


def test_partition_is_immutable():
    p = uniform_partition(1.0, 4)
    with pytest.raises(ValueError):
        p.times[1] = 0.3
    assert p == uniform_partition(1.0, 4)
    assert isinstance(p, TimePartition)
