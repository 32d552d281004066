"""
Fibonacci lengths, words and signals
====================================

The quasiperiodic building blocks: step lengths, the substitution word
and a two-frequency signal that never repeats.
"""

import numpy as np

from quasiwalk import (QuasiperiodicSignal, fibonacci_lengths, fibonacci_word,
                       quasiperiodic_partition, signal_eval)

# step lengths l_0 .. l_12
fib = fibonacci_lengths(12)
print("lengths:", fib.values)

# ratios of neighbours approach the golden ratio
ratios = np.array(fib.values[2:], dtype=float) / np.array(fib.values[1:-1], dtype=float)
print("ratios :", np.round(ratios, 6))

# the word grows by A -> AB, B -> A; its length is again a Fibonacci number
for g in range(1, 8):
    w = fibonacci_word(g)
    print(f"generation {g}: {w.symbols:<21s} A={w.count('A')} B={w.count('B')}")

# long (A) and short (B) letters give a quasiperiodic time grid
part = quasiperiodic_partition(1.0, 8, fibonacci_word(6))
print("increments:", np.round(part.increments, 4))

# x(tau) = cos 2 pi tau + cos 2 pi alpha tau on a coarse grid
tau = np.linspace(0, 5, 11)
print("signal:", np.round(signal_eval(QuasiperiodicSignal(), tau), 4))
