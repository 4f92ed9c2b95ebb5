"""quinturb: Wick-chaos, quintic-tree and lattice-resonance toolkit.

The package studies the statistical closure of a quintic dispersive model
with random Gaussian data on a large one-dimensional lattice:

* :mod:`quinturb.chaos` — finite Wiener-chaos expansions over a family of
  complex Gaussians, Wick products and exact pairing expectations;
* :mod:`quinturb.trees` — the quintic ternary-like trees indexing the
  iterated Duhamel expansion, their sign/linear-extension combinatorics;
* :mod:`quinturb.oscillatory` — exact symbolic oscillatory-polynomial
  integrals for the time weights attached to each tree;
* :mod:`quinturb.lattice` — lattice mode sets, admissibility constraints,
  parity permutation classes and amplitude profiles;
* :mod:`quinturb.picard` — the truncated Picard/Duhamel recursion, the
  diagrammatic tree sum, mass observables and Monte Carlo checks;
* :mod:`quinturb.kinetic` — the resonance-sum pipeline: exact phase
  reduction at an astronomically large oscillation rate, the test-function
  pairing, its continuum oscillatory integral and the resonant-manifold
  (kinetic) limit with branch-dependent constants;
* :mod:`quinturb.cli` — command-line front end producing CSV/JSON reports.

Hot lattice folds run on a compiled extension when available and fall back
to a vectorized NumPy lane with bit-identical summation order (see
:mod:`quinturb._kern`).
"""
from __future__ import annotations

from ._kern import LANE as kernel_lane
from .chaos import (
    ChaosExpansion,
    ComplexGaussianIndexing,
    MultiIndex,
    pair_expectation,
    sample_chaos,
    wick_product,
)
from .kinetic import (
    EpsilonRegime,
    KappaTable,
    QuadConfig,
    classify_time,
    continuum_integral,
    delta_reduced,
    i_eps_sum,
    i_l_pairing,
    kinetic_coefficient,
    regime_check,
    residue_count,
    sinc_mass_quadrature,
    third_case_coefficients,
)
from .lattice import (
    Profile,
    RegimeParams,
    count_c_l,
    enumerate_c_l,
    pairing_expectation,
    parity_permutations,
)
from .oscillatory import OscPoly, classify_leading, g_m, g_m_oracle
from .picard import (
    mass_derivative_n1,
    mass_v1,
    pairing_sum,
    picard_recursion,
    tree_sum,
)
from .trees import QuinticTree, enumerate_trees, linear_extensions
from .util import DomainError, NumericalError, ResourceError

__version__ = "0.1.0"

__all__ = [
    "ChaosExpansion",
    "ComplexGaussianIndexing",
    "DomainError",
    "EpsilonRegime",
    "KappaTable",
    "MultiIndex",
    "NumericalError",
    "OscPoly",
    "Profile",
    "QuadConfig",
    "QuinticTree",
    "RegimeParams",
    "ResourceError",
    "classify_leading",
    "classify_time",
    "continuum_integral",
    "count_c_l",
    "delta_reduced",
    "enumerate_c_l",
    "enumerate_trees",
    "g_m",
    "g_m_oracle",
    "i_eps_sum",
    "i_l_pairing",
    "kernel_lane",
    "kinetic_coefficient",
    "linear_extensions",
    "mass_derivative_n1",
    "mass_v1",
    "pair_expectation",
    "pairing_expectation",
    "pairing_sum",
    "parity_permutations",
    "picard_recursion",
    "regime_check",
    "residue_count",
    "sample_chaos",
    "sinc_mass_quadrature",
    "third_case_coefficients",
    "tree_sum",
    "wick_product",
    "__version__",
]
