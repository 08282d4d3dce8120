"""Exact state-vector simulation of temporal entanglement transitions in the driven TFIM."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .model import ChainSpec, ContractError, HamiltonianKind, Kind
from .propagator import EvolutionConfig, evolve
from .groundstate import lanczos_ground_state
from .entanglement import EntanglementTracker, schmidt
from .series import TimeSeries
from .transitions import detect_events, periodicity_report, smoothness_control
from .scaling import collapse, fit_power_law, optimize_collapse, saturation_analysis
from .magnus import compare, transition_time_agreement

__all__ = [
    "BACKEND", "ChainSpec", "ContractError", "HamiltonianKind", "Kind",
    "EvolutionConfig", "evolve", "lanczos_ground_state", "EntanglementTracker",
    "schmidt", "TimeSeries", "detect_events", "periodicity_report",
    "smoothness_control", "collapse", "fit_power_law", "optimize_collapse",
    "saturation_analysis", "compare", "transition_time_agreement",
]
