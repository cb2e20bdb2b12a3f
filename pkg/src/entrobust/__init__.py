"""Robustness of entanglement for diagonal state families.

Closed forms with explicit witness states (:mod:`entrobust.analytic`), a
small primal-dual SDP solver and the PPT robustness program
(:mod:`entrobust.optim`), and a diagonal-family LP oracle.
"""

__version__ = "0.1.0"

from .analytic import RobustnessResult, robustness_analytic, robustness_wootters, verify_pseudomixture
from .linalg import DensityMatrix, partial_transpose
from .optim import SdpProblem, SdpSolution, robustness_ppt_sdp, solve_sdp
from .optim.family import robustness_family_lp
from .separability import family_separable, is_ppt
from .states import descriptor, family_state

__all__ = [
    "DensityMatrix",
    "RobustnessResult",
    "SdpProblem",
    "SdpSolution",
    "__version__",
    "descriptor",
    "family_separable",
    "family_state",
    "is_ppt",
    "partial_transpose",
    "robustness_analytic",
    "robustness_family_lp",
    "robustness_ppt_sdp",
    "robustness_wootters",
    "solve_sdp",
    "verify_pseudomixture",
]
