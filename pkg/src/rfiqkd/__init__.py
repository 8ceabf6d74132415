"""Biased decoy-state reference-frame-independent QKD: simulation, finite-key
bounds and full-parameter key-rate optimization."""
from .channel import BasisPair, ChannelParams, ObservedStatistics, simulate_observations
from .decoy import SinglePhotonBounds, estimate_all
from .optimizer import OptimizerConfig, Scenario, evaluate, objective, optimize, unbiased_baseline
from .params import ProtocolParams, is_feasible
from .security import KeyRateReport, SecurityConfig, SecurityMode
from .statistics import FluctuationConfig

__version__ = "0.1.0"

__all__ = [
    "BasisPair",
    "ChannelParams",
    "FluctuationConfig",
    "KeyRateReport",
    "ObservedStatistics",
    "OptimizerConfig",
    "ProtocolParams",
    "Scenario",
    "SecurityConfig",
    "SecurityMode",
    "SinglePhotonBounds",
    "estimate_all",
    "evaluate",
    "is_feasible",
    "objective",
    "optimize",
    "simulate_observations",
    "unbiased_baseline",
]
