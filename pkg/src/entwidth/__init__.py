"""Entanglement-width criteria for spin chains."""

from .chi_criteria import chi, chi_classical_bound, scan_alpha
from .dynamics_qfi import GradientGenerator, evolve, qfi_pure
from .gradient_sdp import b_squared, j_squared, sdp_intercept
from .sdp import SdpNotConverged, SdpProblem, SdpSolution, solve_sdp
from .spin_ops import ChainGeometry, build_J
from .states import PairingConfiguration, hugging, right_neighbor, singlet_pairing_state
from .variance_criteria import width_bound_matching, width_bound_simple

__version__ = "0.1.0"

__all__ = [
    "ChainGeometry",
    "GradientGenerator",
    "PairingConfiguration",
    "SdpNotConverged",
    "SdpProblem",
    "SdpSolution",
    "b_squared",
    "build_J",
    "chi",
    "chi_classical_bound",
    "evolve",
    "hugging",
    "j_squared",
    "qfi_pure",
    "right_neighbor",
    "scan_alpha",
    "sdp_intercept",
    "singlet_pairing_state",
    "solve_sdp",
    "width_bound_matching",
    "width_bound_simple",
]
