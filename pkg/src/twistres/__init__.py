"""Resonances of mildly twisted quantum waveguides.

A straight tube of constant cross-section carries embedded eigenvalues
E_n + mu_j built from transverse thresholds and longitudinal bound
levels. Twisting the tube couples the channels and turns those embedded
eigenvalues into resonances; to second order in the twist strength eps
the imaginary part is -a eps^2 with a computable width coefficient a.

The package computes every ingredient: transverse modes and their angular
couplings (:mod:`cross_section`), longitudinal bound states and resolvent
boundary values (:mod:`longitudinal`), twist profiles
(:mod:`twist`), the width formula and its deep-well limit (:mod:`width`),
and a complex-scaled coupled-channel solver that exhibits the resonances
directly (:mod:`scaled`). The ``twistres`` command drives it from INI
configs.
"""

__version__ = "0.1.0"

from .cross_section import (CouplingMatrices, CrossSectionSpec,
                            TransverseMode, TransverseModeSet,
                            angular_derivative, boundary_points,
                            coupling_matrices, solve_transverse_modes,
                            twisted_surface_points)
from .errors import (ConfigError, DegenerateTargetError, GridMismatchError,
                     MeshResolutionError, NumericsError, ResolventPoleError,
                     ResonanceLostError, ThresholdCollisionError,
                     TwistresError)
from .longitudinal import (BoundState, MomentReport, PotentialSpec,
                           ResolventBoundaryValue, SampledFunction,
                           bound_levels, bound_states,
                           delta_limit_bound_state, numeric_bound_levels,
                           poschl_teller_levels, poschl_teller_spectrum,
                           resolvent_convergence_probe, resolvent_form,
                           validate_assumption_moment)
from .scaled import (ChannelSystem, ComplexEigenpair, Ray, ScanResult,
                     ScanRow, assemble_channel_system, default_length,
                     default_points, epsilon_scan, essential_rays,
                     locate_resonance, nearby_spectrum)
from .twist import CouplingVector, TwistProfile, coupling_vector
from .width import (ChannelContribution, EmbeddedEigenvalue, LimitWidth,
                    NuScanResult, SpectrumClassification, WidthResult,
                    classify_spectrum, delta_gradient_im, limit_width_delta,
                    threshold_index, width_coefficient, width_vs_nu)

__all__ = [
    "__version__",
    "BoundState", "ChannelContribution", "ChannelSystem",
    "ComplexEigenpair", "ConfigError", "CouplingMatrices", "CouplingVector",
    "CrossSectionSpec", "DegenerateTargetError", "EmbeddedEigenvalue",
    "GridMismatchError", "LimitWidth", "MeshResolutionError", "MomentReport",
    "NuScanResult", "NumericsError", "PotentialSpec", "Ray",
    "ResolventBoundaryValue", "ResolventPoleError", "ResonanceLostError",
    "SampledFunction", "ScanResult", "ScanRow", "SpectrumClassification",
    "ThresholdCollisionError", "TransverseMode", "TransverseModeSet",
    "TwistProfile", "TwistresError", "WidthResult", "angular_derivative",
    "assemble_channel_system", "bound_levels", "bound_states",
    "boundary_points", "classify_spectrum", "coupling_matrices",
    "coupling_vector", "default_length", "default_points",
    "delta_gradient_im", "delta_limit_bound_state", "epsilon_scan",
    "essential_rays", "limit_width_delta", "locate_resonance",
    "nearby_spectrum", "numeric_bound_levels", "poschl_teller_levels",
    "poschl_teller_spectrum", "resolvent_convergence_probe",
    "resolvent_form", "solve_transverse_modes", "threshold_index",
    "twisted_surface_points", "validate_assumption_moment",
    "width_coefficient", "width_vs_nu",
]
