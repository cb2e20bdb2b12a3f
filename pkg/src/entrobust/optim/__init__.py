"""Semidefinite and linear programming routes to the robustness of entanglement."""

from .sdp import (
    Infeasible,
    NotConverged,
    SdpError,
    SdpProblem,
    SdpSolution,
    Unbounded,
    check_slackness,
    solve_sdp,
)
from .ppt import optimal_mixing_weight, ppt_robustness_problem, robustness_ppt_sdp

__all__ = [
    "Infeasible",
    "NotConverged",
    "SdpError",
    "SdpProblem",
    "SdpSolution",
    "Unbounded",
    "check_slackness",
    "optimal_mixing_weight",
    "ppt_robustness_problem",
    "robustness_ppt_sdp",
    "solve_sdp",
]
