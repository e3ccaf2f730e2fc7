"""Perturbation-theory solvers with Epstein-Nesbet partitioning.

Rayleigh-Schrodinger and Brillouin-Wigner energies, a fixed-point
iteration whose per-order cost stays flat after second order, and a
quasi-degenerate extension built on exactly diagonalized model spaces;
all validated against closed forms and a dense Jacobi eigensolver on
two one-dimensional model systems.
"""

from .errors import (
    EigensolverError,
    EnptError,
    NonConvergenceError,
    QuadratureError,
    SmallDenominatorError,
    TargetAmbiguousError,
)
from .nondegen import (
    EnergySeries,
    IterationTrace,
    bw_series_rhs,
    bwpt,
    iterative_pt,
    residual_norm,
    rspt,
    rspt_coefficients,
)
from .partition import EPSTEIN_NESBET, STANDARD, PartitionedSystem, partition
from .quasidegen import (
    QdIterationTrace,
    QdSetup,
    build_model_space,
    qd_iterate,
    qd_second_order,
    select_model_space,
)
from .reference import (
    ReferenceSpectrum,
    dense_eigensolve,
    exact_oscillator_energy,
    jacobi_eigh,
    oscillator_reference_spectrum,
    reference_energy,
)
from .systems import (
    COSINE_BOX,
    OSCILLATOR,
    ModelSystem,
    build_cosine_box,
    build_harmonic_oscillator,
    quadrature_matrix_element,
)

__version__ = "0.1.0"

__all__ = [
    "COSINE_BOX",
    "EPSTEIN_NESBET",
    "OSCILLATOR",
    "STANDARD",
    "EigensolverError",
    "EnergySeries",
    "EnptError",
    "IterationTrace",
    "ModelSystem",
    "NonConvergenceError",
    "PartitionedSystem",
    "QdIterationTrace",
    "QdSetup",
    "QuadratureError",
    "ReferenceSpectrum",
    "SmallDenominatorError",
    "TargetAmbiguousError",
    "build_cosine_box",
    "build_harmonic_oscillator",
    "build_model_space",
    "bw_series_rhs",
    "bwpt",
    "dense_eigensolve",
    "exact_oscillator_energy",
    "iterative_pt",
    "jacobi_eigh",
    "oscillator_reference_spectrum",
    "partition",
    "qd_iterate",
    "qd_second_order",
    "quadrature_matrix_element",
    "reference_energy",
    "residual_norm",
    "rspt",
    "rspt_coefficients",
    "select_model_space",
]
