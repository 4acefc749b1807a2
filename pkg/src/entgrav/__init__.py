"""Gravitational source terms, curvature and static metric perturbations
generated by spatially entangled single-particle states.

Core computations are dimensionless (packet width = 1); the ``scales``
module is the only place SI units appear.
"""

from .curvature import (Field3D, Grid, greens_oracle, ricci_field,
                        ricci_scalar, sample_field, solve_static_poisson,
                        static_metric_perturbation)
from .qstate import (TwoSiteState, concurrence, density_matrix,
                     log_negativity, make_state, negativity)
from .quadrature import (IntegralResult, QuadratureError, QuadratureSpec,
                         integrate_1d, integrate_3d, separable_bilinear)
from .scales import (CODATA2018, Constants, PhysicalScales, Regime,
                     control_parameter, decoherence_time, validity_report)
from .stress_energy import (ModeIntegralSet, SourceTensor, bilinear_component,
                            bilinear_trace, box_trace_closed_form,
                            decay_profile, mode_integrals, source_grids,
                            source_tensor, stress_terms)
from .wavepacket import (Profile, ProfileKind, Site, SitePair,
                         position_density, profile_eval, site_overlap)

__version__ = "0.1.0"

__all__ = [
    "Field3D", "Grid", "greens_oracle", "ricci_field", "ricci_scalar",
    "sample_field", "solve_static_poisson", "static_metric_perturbation",
    "TwoSiteState", "concurrence", "density_matrix", "log_negativity",
    "make_state", "negativity",
    "IntegralResult", "QuadratureError", "QuadratureSpec", "integrate_1d",
    "integrate_3d", "separable_bilinear",
    "CODATA2018", "Constants", "PhysicalScales", "Regime",
    "control_parameter", "decoherence_time", "validity_report",
    "ModeIntegralSet", "SourceTensor", "bilinear_component", "bilinear_trace",
    "box_trace_closed_form", "decay_profile", "mode_integrals",
    "source_grids", "source_tensor", "stress_terms",
    "Profile", "ProfileKind", "Site", "SitePair", "position_density",
    "profile_eval", "site_overlap",
    "__version__",
]
