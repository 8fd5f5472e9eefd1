"""Positivity- and moment-preserving Fourier spectral projection.

The package provides, in dependency order:

- ``grid``: collocation grids, forward/inverse transforms, norms.
- ``moments``: exact monomial Fourier coefficients and discrete moment
  systems built from them.
- ``projection``: the constrained nodal projection (equality-only and
  nonnegative variants) solved by a dual semismooth Newton method.
- ``oracles``: slow, independent reference solvers used to validate the
  fast paths.
- ``boltzmann``: a truncated spectral collision operator for Maxwell-type
  interactions, exercised through time integrators that apply the
  projection each stage.
- ``testfunctions``: benchmark densities with separable structure and
  near-exact reference quantities.
- ``cli``: command line entry points that write the benchmark tables as
  CSV.
"""

from .boltzmann import (
    NonFiniteState,
    SimConfig,
    bhat_xi_eta,
    build_kernel_table,
    collision_apply,
    collision_direct,
    run_simulation,
)
from .grid import (
    GridField,
    GridSpec,
    SpectralField,
    analyze,
    discrete_inner,
    dump_coefficients,
    h1_seminorm,
    l2_norm,
    make_grid,
    sample,
    synthesize,
    truncate,
)
from .moments import (
    MomentBasis,
    MomentSystem,
    build_moment_system,
    monomial_fourier_1d,
    reference_moments,
)
from .projection import (
    KKTReport,
    QPInstance,
    SolveReport,
    SSNParams,
    kkt_check,
    moments_only_project,
    nondegeneracy_probe,
    ssn_solve,
)
from .testfunctions import (
    ConvergenceRow,
    SeparableFunction,
    band_field,
    convergence_table,
    cosine_power,
    exact_moments,
    projection_errors,
    smooth_exponential,
    tail_norm,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRow",
    "GridField",
    "GridSpec",
    "KKTReport",
    "MomentBasis",
    "MomentSystem",
    "NonFiniteState",
    "QPInstance",
    "SSNParams",
    "SeparableFunction",
    "SimConfig",
    "SolveReport",
    "SpectralField",
    "analyze",
    "band_field",
    "bhat_xi_eta",
    "build_kernel_table",
    "build_moment_system",
    "collision_apply",
    "collision_direct",
    "convergence_table",
    "cosine_power",
    "discrete_inner",
    "dump_coefficients",
    "exact_moments",
    "h1_seminorm",
    "kkt_check",
    "l2_norm",
    "make_grid",
    "moments_only_project",
    "monomial_fourier_1d",
    "nondegeneracy_probe",
    "projection_errors",
    "reference_moments",
    "run_simulation",
    "sample",
    "smooth_exponential",
    "ssn_solve",
    "synthesize",
    "tail_norm",
    "truncate",
    "__version__",
]
