"""
Partition functions: paths, chains and BTZ
==========================================

Energies and entropies from the length action, the truncated chain sum,
and the BTZ black hole identities.
"""

import math

from quasiwalk import (BTZParams, ChainThermoSpec, PiecewisePath, chain_entropy, chain_partition_function,
                       entropy_report, fibonacci_lengths, path_thermo, uniform_partition)

path = PiecewisePath(uniform_partition(1.0, 4), [0.0, 1.0, 0.5, 1.5, 1.0])
for beta in (0.5, 1.0, 2.0):
    r = path_thermo(path, beta)
    fd = path_thermo(path, beta, method="finite_difference")
    print(f"beta={beta}: Z={r.Z:.5f} E={r.E:.5f} (fd {fd.E:.8f}) S={r.S:.5f}")

# the chain sum keeps growing with the truncation
for n_max in (4, 16, 64, 256):
    print(f"Z(l=0, n_max={n_max:3d}) = {chain_partition_function(ChainThermoSpec(0, n_max)):.6f}")
fib = fibonacci_lengths(40)
print("S(l=0, n_max=4) =", chain_entropy(ChainThermoSpec(0, 4), fib), "= ln 0.875 =", math.log(0.875))

for G in (0.125, 1.0):
    rep = entropy_report(BTZParams(1.0, 1.0, G))
    print(f"G={G}: S={rep['S']:.6f} A/4G={rep['S_area_law']:.6f} 4 pi r+={rep['S_4_pi_r_plus']:.6f} "
          f"[{rep['convention']}] checks pass: {all(rep['checks'].values())}")
