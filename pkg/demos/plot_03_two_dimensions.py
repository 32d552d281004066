"""
The 2D walk and its closed form
===============================

Compares the literal two-dimensional formula with the exact law of the
four-neighbour walk, and shows how far apart they are.
"""

from quasiwalk import fibonacci_lengths, two_d_audit, two_d_dp_pmf, two_d_paper_pmf

n = 2
exact = two_d_dp_pmf(n, 1, 1)
print("site      formula   exact")
for l in range(-n, n + 1):
    for m in range(-n, n + 1):
        if exact[(l, m)] or two_d_paper_pmf(n, l, m):
            print(f"({l:2d},{m:2d})  {two_d_paper_pmf(n, l, m):.4f}    {exact[(l, m)]:.4f}")

# the formula's mass over the window grows like (2n + 1) / 2
fib = fibonacci_lengths(12)
for n in (2, 4, 8, 12):
    a = two_d_audit(n, fib, fib)
    print(f"n={n:2d}: formula mass {a['formula_window_mass']:.3f}, exact mass {a['exact_total_mass']:.3f}, "
          f"max deviation {a['max_abs_deviation']:.4f} at {a['max_deviation_site']}")
