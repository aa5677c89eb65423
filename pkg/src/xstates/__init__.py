"""Two-qubit X-states: su(4) generators, orbit classification, separability."""

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .orbits import (
    DiagonalizingFrame,
    OrbitClass,
    OrbitKind,
    OrderedSpectrum,
    classify_orbit,
    diagonalize,
    gram,
    mu_values,
    reconstruct,
)
from .separability import (
    ZETA_CRITICAL,
    SeparabilityVerdict,
    absolutely_separable,
    degenerate_criterion,
    degenerate_cross_check,
    ineq_spectrum_angles,
    ppt_elementwise,
    ppt_oracle,
)
from .state import (
    BELL_PHI_PLUS,
    MAXIMALLY_MIXED,
    HVector,
    XState,
    XStateError,
    from_dense,
    h_coefficients,
    make_xstate,
    werner_state,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOLERANCES",
    "Tolerances",
    "DiagonalizingFrame",
    "OrbitClass",
    "OrbitKind",
    "OrderedSpectrum",
    "classify_orbit",
    "diagonalize",
    "gram",
    "mu_values",
    "reconstruct",
    "ZETA_CRITICAL",
    "SeparabilityVerdict",
    "absolutely_separable",
    "degenerate_criterion",
    "degenerate_cross_check",
    "ineq_spectrum_angles",
    "ppt_elementwise",
    "ppt_oracle",
    "BELL_PHI_PLUS",
    "MAXIMALLY_MIXED",
    "HVector",
    "XState",
    "XStateError",
    "from_dense",
    "h_coefficients",
    "make_xstate",
    "werner_state",
    "__version__",
]
