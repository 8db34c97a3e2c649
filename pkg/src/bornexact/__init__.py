"""bornexact: scattering media for which the first Born approximation is exact.

Media whose transverse Fourier content lies strictly above a threshold
frequency alpha scatter plane waves exactly at first Born order for k <=
alpha and not at all for k <= alpha/2.  This package constructs such media,
evaluates their Born amplitudes in closed form and by quadrature, runs the
momentum-space transfer-matrix pipeline as an independent route to the same
observable, and ships the support-algebra oracles behind the claims.
"""

from .em import (
    ANNULUS_GUARD,
    DetectorDirection,
    IncidentWave,
    MomentumPoint,
    exp_izH0,
    free_hamiltonian,
    incident_state,
    projector,
    varpi,
    xi_contract,
)
from .medium import (
    BoundsReport,
    GaussErfProfile,
    GaussianControlProfile,
    MediumProfile,
    RationalEnvelopeProfile,
    SupportReport,
    TransverseBox,
    bounds_check,
    eval_eta,
    fourier_eta_2d,
    fourier_eta_3d,
    profile_from_dict,
    profile_to_dict,
    rotate_to_x,
    reference_medium,
    support_report,
)
from .born import (
    AmplitudeMap,
    MAGNETIC_SIGN,
    OverlapRegion,
    QuadratureSpec,
    amplitude_map,
    fibonacci_hemisphere,
    first_born_amplitude,
    invisibility_report,
    scaling_check,
    scattered_field,
    second_born_amplitude,
    support_overlap,
)
from .sampled import SampledProfile, sample_profile
from .transfer import (
    MomentumGrid,
    load_kernel_dump,
    TransferKernel,
    TSolution,
    amplitude_from_T,
    build_momentum_grid,
    deltaH_block,
    dyson_second_order_norm,
    firstorder_kernel,
    identity_id101_residual,
    solve_T,
    transfer_first_order,
)

__all__ = [
    "ANNULUS_GUARD",
    "AmplitudeMap",
    "BoundsReport",
    "DetectorDirection",
    "GaussErfProfile",
    "GaussianControlProfile",
    "IncidentWave",
    "MAGNETIC_SIGN",
    "MediumProfile",
    "MomentumGrid",
    "MomentumPoint",
    "OverlapRegion",
    "QuadratureSpec",
    "RationalEnvelopeProfile",
    "SampledProfile",
    "SupportReport",
    "TSolution",
    "TransferKernel",
    "TransverseBox",
    "amplitude_from_T",
    "amplitude_map",
    "bounds_check",
    "build_momentum_grid",
    "deltaH_block",
    "dyson_second_order_norm",
    "eval_eta",
    "exp_izH0",
    "fibonacci_hemisphere",
    "first_born_amplitude",
    "firstorder_kernel",
    "fourier_eta_2d",
    "fourier_eta_3d",
    "free_hamiltonian",
    "identity_id101_residual",
    "incident_state",
    "invisibility_report",
    "load_kernel_dump",
    "profile_from_dict",
    "profile_to_dict",
    "projector",
    "rotate_to_x",
    "sample_profile",
    "scaling_check",
    "scattered_field",
    "second_born_amplitude",
    "solve_T",
    "reference_medium",
    "support_report",
    "support_overlap",
    "transfer_first_order",
    "varpi",
    "xi_contract",
]

__version__ = "0.1.0"
