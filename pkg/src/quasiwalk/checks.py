"""Oracle cross-checks run by ``quasiwalk check``.

Each check pairs two independent routes to the same number and returns a
bool; :func:`run_all` collects them in a fixed order.
"""
from __future__ import annotations

import math

import numpy as np

from . import btz, heat, quasiperiodic as qp, thermo, walk
from .numerics import make_stream

K_0_1 = 1.0 / math.sqrt(2.0 * math.pi) * math.exp(-0.5)


def binomial_vs_charfn():
    for n in range(1, 21):
        b = walk.binomial_pmf(n, 0.5)
        if any(abs(walk.char_fn_prob(n, m) - b[m]) > 1e-10 for m in range(-n, n + 1, 2)):
            return False
    return True


def binomial_vs_dp():
    spec = walk.StepDistribution(0.3, 1)
    return all(walk.binomial_pmf(n, 0.3).max_abs_diff(walk.dp_pmf(spec, n)) <= 1e-12 for n in range(21))


def exact_dp_normalized():
    spec = walk.StepDistribution(0.5, qp.fibonacci_lengths(12))
    return walk.dp_pmf(spec, 12, exact=True).total() == 1


def chain_scale_invariance():
    fib = qp.fibonacci_lengths(20)
    for n in (5, 12, 20):
        for l in range(-n, n + 1, 2):
            ref = walk.char_fn_prob(n, l)
            for sched in (fib, 1, 7):
                if abs(walk.fibonacci_walk_position(n, l, sched).probability - ref) > 1e-12:
                    return False
    return True


def two_d_normalized():
    return abs(walk.two_d_dp_pmf(8, qp.fibonacci_lengths(8), qp.fibonacci_lengths(8)).total() - 1) <= 1e-12


def semigroup():
    word = qp.fibonacci_word(3)
    parts = (qp.uniform_partition(1.0, 2), qp.quasiperiodic_partition(1.0, 2, word))
    return all(abs(heat.compose_kernels(p, 0.0, 1.0) - K_0_1) <= 1e-6 for p in parts)


def path_integral(seed):
    part = qp.quasiperiodic_partition(1.0, 5, qp.fibonacci_word(4))
    est = heat.rw_representation_mc(0.0, 1.0, part, 1, 20_000, make_stream(seed), proposal="free")
    return abs(est.mean - K_0_1) <= 4.0 * est.stderr


def action_identities(seed):
    rng = make_stream(seed, 1).generator()
    part = qp.quasiperiodic_partition(2.0, 8, qp.fibonacci_word(6))
    straight = heat.PiecewisePath.straight(part, 0.0, 1.5)
    if not math.isclose(heat.kinetic_action(straight), 1.5**2 / 4.0, rel_tol=1e-14):
        return False
    for _ in range(20):
        nodes = np.concatenate(([0.0], rng.normal(size=7), [1.5]))
        path = heat.PiecewisePath(part, nodes)
        if heat.kinetic_action(path) < 1.5**2 / 4.0:
            return False
        b = rng.uniform(0.1, 3.0)
        cf = thermo.path_thermo(path, b)
        fd = thermo.path_thermo(path, b, "finite_difference")
        if not (math.isclose(cf.S, cf.E + cf.log_Z, rel_tol=1e-14, abs_tol=1e-14)
                and math.isclose(fd.E, cf.E, rel_tol=1e-6)):
            return False
    return True


def chain_partition():
    return abs(thermo.chain_partition_function(thermo.ChainThermoSpec(0, 4)) - 0.875) <= 1e-12


def btz_closure():
    rep = btz.entropy_report(btz.BTZParams(1.0, 1.0, 0.125))
    return all(rep["checks"].values()) and math.isclose(rep["S"], 4 * math.pi, rel_tol=1e-10)


def run_all(seed: int = 0) -> dict:
    return {
        "binomial_vs_charfn": binomial_vs_charfn(),
        "binomial_vs_dp": binomial_vs_dp(),
        "exact_dp_normalized": exact_dp_normalized(),
        "chain_scale_invariance": chain_scale_invariance(),
        "two_d_normalized": two_d_normalized(),
        "semigroup": semigroup(),
        "path_integral": path_integral(seed),
        "action_identities": action_identities(seed),
        "chain_partition": chain_partition(),
        "btz_closure": btz_closure(),
    }
