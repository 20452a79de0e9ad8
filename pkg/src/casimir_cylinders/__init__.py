"""Casimir interaction energies between conducting cylindrical shells.

Spectral log-determinant evaluators for concentric, eccentric and
cylinder-plane configurations, proximity-force baselines with curvature
corrections, a subtraction-accelerated near-contact evaluator, and
proximity estimates for corrugated rack-and-pinion couplings.
"""

from .baselines import (
    PfaOrder,
    accelerated_series,
    large_alpha_asymptote,
    pfa_concentric,
    slow_series,
)
from .bessel import (
    bessel_i,
    bessel_i_prime,
    bessel_k,
    bessel_k_prime,
    scaled_bessel_pair,
    uniform_i_ratio,
    uniform_k_ratio,
)
from .engine import (
    NoConvergenceError,
    energy_concentric_accelerated,
    energy_difference,
    energy_exact,
    tilde_energy,
    tm_te_split,
)
from .geometry import (
    HBAR_C,
    Concentric,
    ConvergenceReport,
    CylinderPlane,
    Eccentric,
    EnergyResult,
    GeometryError,
    Polarization,
    QuadratureRule,
    QuadratureSpec,
    TruncationSpec,
    geometry_from_dict,
    geometry_to_dict,
    to_physical,
    validate,
)
from .kernel import (
    NonContractiveError,
    SpectralMatrix,
    TruncationError,
    addition_theorem_check,
    build_concentric,
    build_cylinder_plane,
    build_eccentric,
    log_det_one_minus,
)
from .rackpinion import (
    CorrugationSpec,
    ProfileJ,
    ValidityWarning,
    energy_cyl_rack,
    energy_plane_rack,
    energy_pp,
    force_ratio,
)

__version__ = "0.1.0"
