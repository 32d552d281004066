"""Random walks on Fibonacci lattices, heat-kernel path integrals under
uniform and quasiperiodic partitions, path-action thermodynamics and BTZ
black-hole entropy."""

from .numerics import QuadratureError, QuadratureSpec, RandomStream, central_difference, integrate, make_stream
from .quasiperiodic import (
    GOLDEN_RATIO,
    FibonacciLengths,
    FibonacciWord,
    QuasiperiodicSignal,
    TimePartition,
    custom_partition,
    fibonacci_lengths,
    fibonacci_word,
    quasiperiodic_partition,
    signal_eval,
    uniform_partition,
)
from .walk import (
    LatticePMF,
    StepDistribution,
    binomial_pmf,
    char_fn_prob,
    dp_pmf,
    fibonacci_walk_position,
    monte_carlo_pmf,
    two_d_audit,
    two_d_dp_pmf,
    two_d_paper_pmf,
)
from .heat import (
    ActionFunctional,
    NonIntegrableActionError,
    DiffusionParams,
    HeatKernelParams,
    PiecewisePath,
    compose_kernels,
    generalized_kernel,
    heat_kernel,
    heat_solution,
    kinetic_action,
    length_action,
    qp_brownian_density,
    rw_representation_mc,
)
from .thermo import (
    ChainThermoSpec,
    ThermoReport,
    chain_entropy,
    chain_entropy_2d,
    chain_partition_function,
    chain_terms,
    path_thermo,
)
from .btz import (BTZParams, energy, entropy, entropy_report, euclidean_action, first_law_ratio,
                  log_partition_function)

__all__ = [
    "ActionFunctional",
    "binomial_pmf",
    "BTZParams",
    "central_difference",
    "chain_entropy",
    "chain_entropy_2d",
    "chain_partition_function",
    "chain_terms",
    "ChainThermoSpec",
    "char_fn_prob",
    "compose_kernels",
    "custom_partition",
    "DiffusionParams",
    "dp_pmf",
    "energy",
    "entropy",
    "entropy_report",
    "euclidean_action",
    "fibonacci_lengths",
    "fibonacci_walk_position",
    "fibonacci_word",
    "FibonacciLengths",
    "FibonacciWord",
    "first_law_ratio",
    "generalized_kernel",
    "GOLDEN_RATIO",
    "heat_kernel",
    "heat_solution",
    "HeatKernelParams",
    "integrate",
    "kinetic_action",
    "LatticePMF",
    "length_action",
    "log_partition_function",
    "make_stream",
    "monte_carlo_pmf",
    "NonIntegrableActionError",
    "path_thermo",
    "PiecewisePath",
    "qp_brownian_density",
    "QuadratureError",
    "QuadratureSpec",
    "quasiperiodic_partition",
    "QuasiperiodicSignal",
    "RandomStream",
    "rw_representation_mc",
    "signal_eval",
    "StepDistribution",
    "ThermoReport",
    "TimePartition",
    "two_d_audit",
    "two_d_dp_pmf",
    "two_d_paper_pmf",
    "uniform_partition",
]

__version__ = "0.1.0"
