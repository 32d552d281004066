"""
Heat kernel as a sum over paths
===============================

Chapman-Kolmogorov composition over uniform and quasiperiodic time
grids, then the Monte Carlo path integral, then a non-Gaussian action.
"""

import math

from quasiwalk import (ActionFunctional, HeatKernelParams, compose_kernels, fibonacci_word,
                       generalized_kernel, heat_kernel, make_stream, quasiperiodic_partition,
                       rw_representation_mc, uniform_partition)

target = heat_kernel(HeatKernelParams(1, 1.0), 0.0, 1.0)
print(f"K_1(0, 1) = {target:.12f}")

word = fibonacci_word(8)
for n in (2, 3, 4):
    for name, part in (("uniform", uniform_partition(1.0, n)),
                       ("quasiperiodic", quasiperiodic_partition(1.0, n, word))):
        print(f"compose {name:13s} N={n}: {compose_kernels(part, 0.0, 1.0):.12f}")

# Monte Carlo: bridge proposals are exact for this action, free ones are noisy
for n in (4, 8):
    part = quasiperiodic_partition(1.0, n, word)
    for proposal in ("bridge", "free"):
        est = rw_representation_mc(0.0, 1.0, part, samples=100_000, stream=make_stream(n),
                                   proposal=proposal)
        print(f"MC N={n} {proposal:6s}: {est.mean:.6f} +- {est.stderr:.6f}")

# a length action beta * sum |x_i - x_{i-1}| gives a different kernel
for beta in (0.5, 1.0, 2.0):
    val = generalized_kernel(ActionFunctional.length(beta), 0.0, 0.0, uniform_partition(1.0, 2))
    print(f"length action beta={beta}: H = {val:.10f} (closed form {1 / (2 * math.pi * 0.5 * beta):.10f})")
