"""
One law, four routes
====================

The position law of a symmetric walk computed from the binomial closed
form, by Fourier inversion, by exact convolution and by Monte Carlo.
"""

from quasiwalk import (StepDistribution, binomial_pmf, char_fn_prob, dp_pmf, fibonacci_lengths,
                       fibonacci_walk_position, make_stream, monte_carlo_pmf)

N = 10
spec = StepDistribution(0.5, 1)
exact = dp_pmf(spec, N)
mc = monte_carlo_pmf(spec, N, 200_000, make_stream(2024))

print(" site   binomial     char-fn      DP           MC (stderr)")
for m in binomial_pmf(N, 0.5).sites():
    print(f"{m:5d}  {binomial_pmf(N, 0.5)[m]:.8f}  {char_fn_prob(N, m):.8f}  "
          f"{exact[m]:.8f}  {mc[m]:.5f} ({mc.stderr(m):.5f})")

# On the Fibonacci chain the site moves out to l * l_n, yet its probability
# does not depend on the lengths at all.
fib = fibonacci_lengths(20)
for l in (0, 2, 4):
    site = fibonacci_walk_position(N, l, fib)
    print(f"l={l}: position {site.position:4d}, probability {site.probability:.8f}")

# Exact convolution over the Fibonacci schedule spreads the same mass over
# many more sites.
chain = dp_pmf(StepDistribution(0.5, fib), N)
print(f"Fibonacci schedule, {N} steps: {len(chain)} sites, total {chain.total():.15f}")
